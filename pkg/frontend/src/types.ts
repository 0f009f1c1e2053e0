// Response shapes of the validation service (see docs/api_reference.md in
// the repository root). The UI never derives index semantics itself; these
// are the only facts it knows.

export type DecisionState = "undecided" | "accepted" | "rejected";
export type Filter = "all" | DecisionState;

export interface ScoreComponents {
  frequency: number;
  dispersion: number;
  salience: number;
  cohesion: number;
}

export interface EntryView {
  term_id: number;
  canonical: string;
  label: string;
  tf: number;
  decision_state: DecisionState;
  components: ScoreComponents;
  total: number;
}

export interface Summary {
  document_id: string;
  status: string;
  budget: number | null;
  truncation_warning: boolean;
  terms: number;
  accepted: number;
  rejected: number;
  undecided: number;
  decisions: number;
}

export interface EntriesPage {
  summary: Summary;
  page: number;
  page_size: number;
  total_entries: number;
  entries: EntryView[];
}

export interface RelationView {
  subject_id: string;
  source_id: number;
  target_id: number;
  source: string;
  target: string;
  kind: string;
  evidence: string;
  confidence: number;
}

export interface OccurrenceView {
  page: number;
  segment_id: number;
  span: [number, number];
  in_heading: boolean;
  emphasized: boolean;
  cue_context: boolean;
}

export interface PageRefView {
  start: number;
  end: number;
  qualified: boolean;
  subject_id: string;
}

export interface SegmentPreview {
  segment_id: number;
  occurrence_count: number;
  score: number;
  preview: string;
  subject_id: string;
}

export interface TermDetail extends EntryView {
  is_acronym: boolean;
  relations: RelationView[];
  occurrences: OccurrenceView[];
  page_refs: PageRefView[];
  see: number | null;
  see_also: number[];
  segment_previews: SegmentPreview[];
}

export interface Tallies {
  terms: number;
  accepted: number;
  rejected: number;
  undecided: number;
  decisions: number;
}

export type SubjectKind = "term" | "relation" | "page_ref" | "segment_ref";
export type Action = "accept" | "reject" | "relabel" | "retarget";

export interface DecisionRequest {
  subject_kind: SubjectKind;
  subject_id: string;
  action: Action;
  payload?: string | null;
  author?: string;
  document_id?: string | null;
}
