// UI state and the optimistic decision queue.
//
// Every mutation is optimistic: the card changes immediately, the decision
// goes into a FIFO queue, and the queue drains strictly in submission
// order with one request in flight. A 4xx rolls the card back and shows a
// toast; a 409 (stale draft) forces a full resync from the service; a
// network failure keeps the queue intact behind an offline banner so
// nothing is silently lost. All durable state lives server-side: a fresh
// controller rebuilds the whole view from service responses alone.

import { ApiError, type ServiceApi } from "./api.js";
import type {
  Action,
  DecisionRequest,
  DecisionState,
  EntriesPage,
  EntryView,
  Filter,
  Summary,
  Tallies,
  TermDetail,
} from "./types.js";

export type SyncStatus = "idle" | "sending" | "offline";

export interface Toast {
  id: number;
  kind: "error" | "info";
  message: string;
}

interface Rollback {
  entry?: { termId: number; state: DecisionState; label: string };
  detail?: TermDetail;
}

interface QueuedDecision {
  decision: DecisionRequest;
  rollback: Rollback;
}

export type Tab = "queue" | "tree" | "export";

export interface UiState {
  tab: Tab;
  page: number;
  pageSize: number;
  filter: Filter;
  focusedTerm: number | null;
  summary: Summary | null;
  totalEntries: number;
  entries: EntryView[];
  detail: TermDetail | null;
  detailMissing: boolean;
  queue: QueuedDecision[];
  syncStatus: SyncStatus;
  lastSyncAt: number | null;
  tallies: Tallies | null;
  toasts: Toast[];
  exportPreview: string | null;
  treePreview: string | null;
}

export function initialState(): UiState {
  return {
    tab: "queue",
    page: 0,
    pageSize: 50,
    filter: "all",
    focusedTerm: null,
    summary: null,
    totalEntries: 0,
    entries: [],
    detail: null,
    detailMissing: false,
    queue: [],
    syncStatus: "idle",
    lastSyncAt: null,
    tallies: null,
    toasts: [],
    exportPreview: null,
    treePreview: null,
  };
}

let toastCounter = 0;

export class Controller {
  state: UiState = initialState();
  private listeners: Array<() => void> = [];
  private draining = false;
  private now: () => number;

  constructor(
    private api: ServiceApi,
    now: () => number = Date.now,
  ) {
    this.now = now;
  }

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  private toast(kind: Toast["kind"], message: string): void {
    this.state.toasts.push({ id: ++toastCounter, kind, message });
    if (this.state.toasts.length > 5) this.state.toasts.shift();
  }

  dismissToast(id: number): void {
    this.state.toasts = this.state.toasts.filter((t) => t.id !== id);
    this.emit();
  }

  // ---- loading -----------------------------------------------------------

  async load(): Promise<void> {
    try {
      const page: EntriesPage = await this.api.listEntries(
        this.state.page,
        this.state.pageSize,
        this.state.filter,
      );
      this.state.summary = page.summary;
      this.state.totalEntries = page.total_entries;
      this.state.entries = page.entries;
      this.state.tallies = {
        terms: page.summary.terms,
        accepted: page.summary.accepted,
        rejected: page.summary.rejected,
        undecided: page.summary.undecided,
        decisions: page.summary.decisions,
      };
      this.markOnline();
      if (this.state.focusedTerm !== null) {
        await this.openTerm(this.state.focusedTerm);
        return;
      }
    } catch (err) {
      this.handleTransportError(err);
    }
    this.emit();
  }

  async setFilter(filter: Filter): Promise<void> {
    this.state.filter = filter;
    this.state.page = 0;
    await this.load();
  }

  async setPage(page: number): Promise<void> {
    this.state.page = Math.max(0, page);
    await this.load();
  }

  async setTab(tab: Tab): Promise<void> {
    this.state.tab = tab;
    if (tab === "export" || tab === "tree") {
      await this.refreshPreviews();
    }
    this.emit();
  }

  async openTerm(termId: number): Promise<void> {
    this.state.focusedTerm = termId;
    this.state.detailMissing = false;
    try {
      this.state.detail = await this.api.getTerm(termId);
      this.markOnline();
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        this.state.detail = null;
        this.state.detailMissing = true;
      } else {
        this.handleTransportError(err);
      }
    }
    this.emit();
  }

  closeTerm(): void {
    this.state.focusedTerm = null;
    this.state.detail = null;
    this.state.detailMissing = false;
    this.emit();
  }

  /** The export preview is the service's own rendering, byte for byte;
   * the UI never re-derives it. */
  async refreshPreviews(): Promise<void> {
    try {
      this.state.exportPreview = await this.api.exportText();
      this.state.treePreview = this.state.exportPreview;
      this.markOnline();
    } catch (err) {
      this.handleTransportError(err);
    }
    this.emit();
  }

  // ---- decisions ---------------------------------------------------------

  decideTerm(termId: number, action: Extract<Action, "accept" | "reject">): void {
    const entry = this.state.entries.find((e) => e.term_id === termId);
    const rollback: Rollback = {};
    if (entry) {
      rollback.entry = {
        termId,
        state: entry.decision_state,
        label: entry.label,
      };
      entry.decision_state = action === "accept" ? "accepted" : "rejected";
    }
    if (this.state.detail && this.state.detail.term_id === termId) {
      rollback.detail = rollback.detail ?? structuredClone(this.state.detail);
      this.state.detail.decision_state = action === "accept" ? "accepted" : "rejected";
    }
    this.enqueue({ subject_kind: "term", subject_id: String(termId), action }, rollback);
  }

  relabelTerm(termId: number, label: string): void {
    const rollback: Rollback = {};
    const entry = this.state.entries.find((e) => e.term_id === termId);
    if (entry) {
      rollback.entry = { termId, state: entry.decision_state, label: entry.label };
      entry.label = label || entry.label;
    }
    if (this.state.detail && this.state.detail.term_id === termId) {
      rollback.detail = structuredClone(this.state.detail);
      this.state.detail.label = label || this.state.detail.label;
    }
    this.enqueue(
      { subject_kind: "term", subject_id: String(termId), action: "relabel", payload: label },
      rollback,
    );
  }

  retargetTerm(termId: number, newParentId: string): void {
    this.enqueue(
      {
        subject_kind: "term",
        subject_id: String(termId),
        action: "retarget",
        payload: newParentId,
      },
      {},
    );
  }

  rejectRelation(subjectId: string): void {
    const rollback: Rollback = {};
    if (this.state.detail) {
      rollback.detail = structuredClone(this.state.detail);
      this.state.detail.relations = this.state.detail.relations.filter(
        (r) => r.subject_id !== subjectId,
      );
    }
    this.enqueue(
      { subject_kind: "relation", subject_id: subjectId, action: "reject" },
      rollback,
    );
  }

  rejectPageRef(subjectId: string): void {
    const rollback: Rollback = {};
    if (this.state.detail) {
      rollback.detail = structuredClone(this.state.detail);
      this.state.detail.page_refs = this.state.detail.page_refs.filter(
        (r) => r.subject_id !== subjectId,
      );
    }
    this.enqueue(
      { subject_kind: "page_ref", subject_id: subjectId, action: "reject" },
      rollback,
    );
  }

  rejectSegmentRef(subjectId: string): void {
    const rollback: Rollback = {};
    if (this.state.detail) {
      rollback.detail = structuredClone(this.state.detail);
      this.state.detail.segment_previews = this.state.detail.segment_previews.filter(
        (r) => r.subject_id !== subjectId,
      );
    }
    this.enqueue(
      { subject_kind: "segment_ref", subject_id: subjectId, action: "reject" },
      rollback,
    );
  }

  private enqueue(decision: DecisionRequest, rollback: Rollback): void {
    const documentId = this.state.summary?.document_id ?? null;
    this.state.queue.push({
      decision: { ...decision, document_id: documentId },
      rollback,
    });
    this.emit();
    void this.drain();
  }

  private applyRollback(rollback: Rollback): void {
    if (rollback.entry) {
      const entry = this.state.entries.find(
        (e) => e.term_id === rollback.entry!.termId,
      );
      if (entry) {
        entry.decision_state = rollback.entry.state;
        entry.label = rollback.entry.label;
      }
    }
    if (rollback.detail && this.state.detail?.term_id === rollback.detail.term_id) {
      this.state.detail = rollback.detail;
    }
  }

  /** Send queued decisions strictly in submission order, one in flight. */
  private async drain(): Promise<void> {
    if (this.draining) return;
    this.draining = true;
    try {
      while (this.state.queue.length > 0) {
        const head = this.state.queue[0];
        this.state.syncStatus = "sending";
        this.emit();
        try {
          const tallies = await this.api.postDecision(head.decision);
          this.state.queue.shift();
          this.state.tallies = tallies;
          this.markOnline();
          this.emit();
        } catch (err) {
          if (err instanceof ApiError && err.status === 409) {
            // stale draft: the server is authoritative, resync everything
            this.state.queue.shift();
            this.toast("error", `conflict: ${err.message} (resyncing)`);
            await this.load();
            await this.refreshPreviews();
            break;
          }
          if (err instanceof ApiError) {
            this.state.queue.shift();
            this.applyRollback(head.rollback);
            this.toast("error", `${head.decision.action} refused: ${err.message}`);
            this.state.syncStatus = "idle";
            this.emit();
            continue;
          }
          // network failure: keep the queue, surface the banner
          this.state.syncStatus = "offline";
          this.emit();
          break;
        }
      }
      if (this.state.queue.length === 0 && this.state.syncStatus === "sending") {
        this.state.syncStatus = "idle";
        this.emit();
      }
    } finally {
      this.draining = false;
    }
  }

  /** Retry button on the offline banner. */
  async retry(): Promise<void> {
    if (this.state.syncStatus === "offline") {
      this.state.syncStatus = "idle";
      this.emit();
    }
    await this.drain();
    if (this.state.queue.length === 0) {
      await this.load();
    }
  }

  flushed(): boolean {
    return this.state.queue.length === 0;
  }

  /** Wait for the queue to drain, including any resync triggered by a
   * conflict (used by export and the tests). */
  async settle(): Promise<void> {
    while (
      (this.state.queue.length > 0 || this.draining) &&
      this.state.syncStatus !== "offline"
    ) {
      await new Promise((resolve) => setTimeout(resolve, 5));
    }
  }

  private markOnline(): void {
    this.state.lastSyncAt = this.now();
    if (this.state.syncStatus === "offline") this.state.syncStatus = "idle";
  }

  private handleTransportError(err: unknown): void {
    if (err instanceof ApiError) {
      this.toast("error", err.message);
    } else {
      this.state.syncStatus = "offline";
    }
  }
}
