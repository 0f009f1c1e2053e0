// DOM bootstrap: wires the controller to the page. Everything interesting
// lives in state.ts / render.ts; this file only routes events.

import { createApi } from "./api.js";
import { handleKey } from "./keyboard.js";
import { Controller } from "./state.js";
import { renderApp } from "./render.js";

function download(filename: string, text: string, type: string): void {
  const blob = new Blob([text], { type });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}

export function mount(root: HTMLElement, baseUrl = ""): Controller {
  const api = createApi(baseUrl);
  const controller = new Controller(api);
  let cursor = 0; // keyboard focus inside the worklist

  const rerender = () => {
    root.innerHTML = renderApp(controller.state);
  };
  controller.subscribe(rerender);

  root.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>(
      "[data-action], [data-tab], [data-filter]",
    );
    if (!target) return;
    const termAttr = target.dataset.term;
    const termId = termAttr ? Number(termAttr) : null;
    const subject = target.dataset.subject ?? "";
    if (target.dataset.tab) {
      void controller.setTab(target.dataset.tab as "queue" | "tree" | "export");
      return;
    }
    if (target.dataset.filter) {
      void controller.setFilter(target.dataset.filter as never);
      return;
    }
    switch (target.dataset.action) {
      case "accept":
        if (termId !== null) controller.decideTerm(termId, "accept");
        break;
      case "reject":
        if (termId !== null) controller.decideTerm(termId, "reject");
        break;
      case "open":
        if (termId !== null) void controller.openTerm(termId);
        break;
      case "close-detail":
        controller.closeTerm();
        break;
      case "reject-relation":
        controller.rejectRelation(subject);
        break;
      case "reject-page-ref":
        controller.rejectPageRef(subject);
        break;
      case "reject-segment-ref":
        controller.rejectSegmentRef(subject);
        break;
      case "relabel": {
        const input = root.querySelector<HTMLInputElement>('[data-field="relabel"]');
        if (termId !== null && input) controller.relabelTerm(termId, input.value);
        break;
      }
      case "retarget": {
        const input = root.querySelector<HTMLInputElement>('[data-field="retarget"]');
        if (termId !== null && input) controller.retargetTerm(termId, input.value.trim());
        break;
      }
      case "retry":
        void controller.retry();
        break;
      case "dismiss-toast":
        controller.dismissToast(Number(target.dataset.toast));
        break;
      case "prev-page":
        void controller.setPage(controller.state.page - 1);
        break;
      case "next-page":
        void controller.setPage(controller.state.page + 1);
        break;
      case "download-text":
        void api.exportText().then((text) =>
          download("index.txt", text, "text/plain"),
        );
        break;
      case "download-interchange":
        void api.exportInterchange().then((text) =>
          download("index.json", text, "application/json"),
        );
        break;
    }
  });

  document.addEventListener("keydown", (event) => {
    const inField =
      event.target instanceof HTMLInputElement ||
      event.target instanceof HTMLTextAreaElement;
    const entries = controller.state.entries;
    const focusedId = () => entries[cursor]?.term_id ?? null;
    const used = handleKey(event.key, inField, {
      accept() {
        const id = focusedId();
        if (id !== null) controller.decideTerm(id, "accept");
      },
      reject() {
        const id = focusedId();
        if (id !== null) controller.decideTerm(id, "reject");
      },
      open() {
        const id = focusedId();
        if (id !== null) void controller.openTerm(id);
      },
      next() {
        cursor = Math.min(cursor + 1, entries.length - 1);
        const id = focusedId();
        if (id !== null) controller.state.focusedTerm = id;
        rerender();
      },
      previous() {
        cursor = Math.max(cursor - 1, 0);
        const id = focusedId();
        if (id !== null) controller.state.focusedTerm = id;
        rerender();
      },
      back() {
        controller.closeTerm();
      },
    });
    if (used) event.preventDefault();
  });

  void controller.load();
  return controller;
}

declare global {
  interface Window {
    indexkitUi?: Controller;
  }
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    // served at /ui by the validation service; the API lives at the root
    window.indexkitUi = mount(root, "");
  }
}
