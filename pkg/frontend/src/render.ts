// Pure view functions: UiState in, HTML strings out. Keeping these free of
// DOM access lets the tests assert on markup without a browser.

import type { UiState } from "./state.js";
import type { EntryView, ScoreComponents } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function pct(value: number): string {
  return `${Math.round(Math.max(0, Math.min(1, value)) * 100)}%`;
}

export function renderScoreBars(components: ScoreComponents): string {
  const rows = (
    [
      ["frequency", components.frequency],
      ["dispersion", components.dispersion],
      ["salience", components.salience],
      ["cohesion", components.cohesion],
    ] as const
  ).map(
    ([name, value]) =>
      `<div class="bar-row" title="${name} ${pct(value)}">` +
      `<span class="bar-label">${name.slice(0, 4)}</span>` +
      `<span class="bar"><span class="bar-fill bar-${name}" style="width:${pct(value)}"></span></span>` +
      `</div>`,
  );
  return `<div class="score-bars">${rows.join("")}</div>`;
}

export function renderEntryCard(entry: EntryView, focused: boolean): string {
  const classes = ["card", `state-${entry.decision_state}`];
  if (focused) classes.push("focused");
  return (
    `<article class="${classes.join(" ")}" data-term="${entry.term_id}">` +
    `<header>` +
    `<span class="label">${escapeHtml(entry.label)}</span>` +
    `<span class="canonical">${escapeHtml(entry.canonical)}</span>` +
    `<span class="badge badge-${entry.decision_state}">${entry.decision_state}</span>` +
    `</header>` +
    renderScoreBars(entry.components) +
    `<footer>` +
    `<span class="total">score ${entry.total.toFixed(3)}</span>` +
    `<span class="tf">${entry.tf}×</span>` +
    `<span class="actions">` +
    `<button data-action="accept" data-term="${entry.term_id}">accept (a)</button>` +
    `<button data-action="reject" data-term="${entry.term_id}">reject (x)</button>` +
    `<button data-action="open" data-term="${entry.term_id}">open (o)</button>` +
    `</span>` +
    `</footer>` +
    `</article>`
  );
}

export function renderQueue(state: UiState): string {
  if (state.entries.length === 0) {
    return `<div class="empty-state">nothing ${
      state.filter === "all" ? "loaded" : state.filter
    } here</div>`;
  }
  return state.entries
    .map((e) => renderEntryCard(e, e.term_id === state.focusedTerm))
    .join("\n");
}

export function renderSummary(state: UiState): string {
  const s = state.summary;
  if (!s) return `<div class="summary">loading…</div>`;
  const t = state.tallies;
  const warn = s.truncation_warning ? ` <span class="warn">budget overrun</span>` : "";
  return (
    `<div class="summary">` +
    `<strong>${escapeHtml(s.document_id)}</strong> · ${s.status}` +
    ` · budget ${s.budget ?? "none"}${warn}` +
    (t
      ? ` · <span class="tally">${t.accepted} accepted</span>` +
        ` / <span class="tally">${t.rejected} rejected</span>` +
        ` / <span class="tally">${t.undecided} undecided</span>`
      : "") +
    `</div>`
  );
}

export function renderSyncStatus(state: UiState): string {
  if (state.syncStatus === "offline") {
    return (
      `<div class="banner banner-offline">service unreachable — ` +
      `${state.queue.length} decision(s) waiting ` +
      `<button data-action="retry">retry</button></div>`
    );
  }
  const pending = state.queue.length
    ? ` · ${state.queue.length} pending`
    : "";
  const when = state.lastSyncAt
    ? new Date(state.lastSyncAt).toLocaleTimeString()
    : "never";
  return `<div class="sync">sync: ${state.syncStatus}${pending} · last ${when}</div>`;
}

export function renderDetail(state: UiState): string {
  if (state.detailMissing) {
    return `<div class="detail empty-state">term not found (removed?)</div>`;
  }
  const d = state.detail;
  if (!d) return "";
  const parts: string[] = [];
  parts.push(
    `<header class="detail-header">` +
      `<button data-action="close-detail">← back</button>` +
      `<h2>${escapeHtml(d.label)}</h2>` +
      `<span class="canonical">${escapeHtml(d.canonical)}</span>` +
      `<span class="badge badge-${d.decision_state}">${d.decision_state}</span>` +
      `</header>`,
  );
  if (d.see !== null) {
    parts.push(
      `<p class="redirect">redirect: <em>see</em> term #${d.see} — redirects carry no page references</p>`,
    );
  } else {
    const refs = d.page_refs
      .map(
        (r) =>
          `<li>${r.start === r.end ? r.start : `${r.start}-${r.end}`}` +
          `<span class="badge badge-${r.qualified ? "qualified" : "mention"}">` +
          `${r.qualified ? "discussed" : "mention"}</span>` +
          `<button data-action="reject-page-ref" data-subject="${r.subject_id}">reject</button></li>`,
      )
      .join("");
    parts.push(`<section><h3>page references</h3><ul class="page-refs">${refs}</ul></section>`);
  }
  const rels = d.relations
    .map(
      (r) =>
        `<li>${escapeHtml(r.source)} → ${escapeHtml(r.target)} ` +
        `<span class="kind">${r.kind}</span> ` +
        `<span class="conf">${r.confidence.toFixed(2)}</span>` +
        `<button data-action="reject-relation" data-subject="${r.subject_id}">reject</button></li>`,
    )
    .join("");
  parts.push(`<section><h3>relations</h3><ul class="relations">${rels}</ul></section>`);
  const previews = d.segment_previews
    .map(
      (p) =>
        `<li><span class="score">${p.score.toFixed(2)}</span> ` +
        `<span class="snippet">${escapeHtml(p.preview)}</span>` +
        `<button data-action="reject-segment-ref" data-subject="${p.subject_id}">reject</button></li>`,
    )
    .join("");
  parts.push(
    `<section><h3>reference segments</h3><ol class="previews">${previews}</ol></section>`,
  );
  parts.push(
    `<section class="edit"><h3>edit</h3>` +
      `<input type="text" data-field="relabel" placeholder="new label" value="${escapeHtml(d.label)}">` +
      `<button data-action="relabel" data-term="${d.term_id}">relabel</button>` +
      `<input type="text" data-field="retarget" placeholder="new parent term id (empty = top level)">` +
      `<button data-action="retarget" data-term="${d.term_id}">re-file</button>` +
      `</section>`,
  );
  return `<div class="detail">${parts.join("")}</div>`;
}

export function renderToasts(state: UiState): string {
  return state.toasts
    .map(
      (t) =>
        `<div class="toast toast-${t.kind}" data-toast="${t.id}">` +
        `${escapeHtml(t.message)}<button data-action="dismiss-toast" data-toast="${t.id}">×</button></div>`,
    )
    .join("");
}

export function renderExport(state: UiState): string {
  const body = state.exportPreview ?? "(not loaded)";
  return (
    `<div class="export">` +
    `<button data-action="download-text">download text</button>` +
    `<button data-action="download-interchange">download interchange</button>` +
    `<pre class="preview">${escapeHtml(body)}</pre>` +
    `</div>`
  );
}

export function renderTree(state: UiState): string {
  const body = state.treePreview ?? "(not loaded)";
  return `<pre class="tree">${escapeHtml(body)}</pre>`;
}

export function renderApp(state: UiState): string {
  const tabs = (["queue", "tree", "export"] as const)
    .map(
      (tab) =>
        `<button class="tab ${state.tab === tab ? "active" : ""}" data-tab="${tab}">${tab}</button>`,
    )
    .join("");
  const filters = (["all", "undecided", "accepted", "rejected"] as const)
    .map(
      (f) =>
        `<button class="filter ${state.filter === f ? "active" : ""}" data-filter="${f}">${f}</button>`,
    )
    .join("");
  let body = "";
  if (state.tab === "queue") {
    body = state.detail || state.detailMissing
      ? renderDetail(state)
      : `<div class="filters">${filters}</div>` +
        `<div class="cards">${renderQueue(state)}</div>` +
        renderPagination(state);
  } else if (state.tab === "tree") {
    body = renderTree(state);
  } else {
    body = renderExport(state);
  }
  return (
    renderSummary(state) +
    `<nav class="tabs">${tabs}</nav>` +
    `<main>${body}</main>` +
    renderSyncStatus(state) +
    `<div class="toasts">${renderToasts(state)}</div>`
  );
}

function renderPagination(state: UiState): string {
  const pages = Math.max(1, Math.ceil(state.totalEntries / state.pageSize));
  return (
    `<div class="pagination">` +
    `<button data-action="prev-page" ${state.page === 0 ? "disabled" : ""}>prev</button>` +
    `<span>page ${state.page + 1} / ${pages}</span>` +
    `<button data-action="next-page" ${state.page + 1 >= pages ? "disabled" : ""}>next</button>` +
    `</div>`
  );
}
