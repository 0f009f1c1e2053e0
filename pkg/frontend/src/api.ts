// Thin fetch wrapper over the validation service. Raises ApiError with the
// HTTP status so the state layer can distinguish rollback (4xx) from
// resync (409) from offline (network failure).

import type {
  DecisionRequest,
  EntriesPage,
  Filter,
  Tallies,
  TermDetail,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body: keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export interface ServiceApi {
  listEntries(page: number, pageSize: number, filter: Filter): Promise<EntriesPage>;
  getTerm(termId: number): Promise<TermDetail>;
  postDecision(decision: DecisionRequest): Promise<Tallies>;
  exportText(): Promise<string>;
  exportInterchange(): Promise<string>;
}

export function createApi(baseUrl = ""): ServiceApi {
  const root = baseUrl.replace(/\/$/, "");
  return {
    async listEntries(page, pageSize, filter) {
      const params = new URLSearchParams({
        page: String(page),
        page_size: String(pageSize),
        filter,
      });
      return asJson<EntriesPage>(await fetch(`${root}/entries?${params}`));
    },

    async getTerm(termId) {
      return asJson<TermDetail>(await fetch(`${root}/terms/${termId}`));
    },

    async postDecision(decision) {
      const response = await fetch(`${root}/decisions`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(decision),
      });
      const body = await asJson<{ ok: boolean; tallies: Tallies }>(response);
      return body.tallies;
    },

    async exportText() {
      const response = await fetch(`${root}/export?format=text`);
      if (!response.ok) throw new ApiError(response.status, response.statusText);
      return response.text();
    },

    async exportInterchange() {
      const response = await fetch(`${root}/export?format=interchange`);
      if (!response.ok) throw new ApiError(response.status, response.statusText);
      return response.text();
    },
  };
}
