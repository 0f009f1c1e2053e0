import { describe, expect, it } from "vitest";

import { Controller } from "../src/state.js";
import { FakeService, entry } from "./fake.js";

function makeController(entries = [entry(1, "Alpha"), entry(2, "Beta")]) {
  const api = new FakeService(entries);
  const controller = new Controller(api, () => 1234567890);
  return { api, controller };
}

describe("optimistic decisions", () => {
  it("marks the card immediately and confirms through the queue", async () => {
    const { api, controller } = makeController();
    await controller.load();
    controller.decideTerm(1, "accept");
    // optimistic: visible before the server answers
    expect(controller.state.entries[0].decision_state).toBe("accepted");
    await controller.settle();
    expect(api.posted).toHaveLength(1);
    expect(controller.state.tallies?.accepted).toBe(1);
    expect(controller.state.syncStatus).toBe("idle");
  });

  it("drains strictly in submission order", async () => {
    const { api, controller } = makeController();
    api.postDelayMs = 5;
    await controller.load();
    controller.decideTerm(1, "accept");
    controller.decideTerm(2, "reject");
    controller.decideTerm(1, "reject");
    await controller.settle();
    expect(api.posted.map((d) => `${d.subject_id}:${d.action}`)).toEqual([
      "1:accept",
      "2:reject",
      "1:reject",
    ]);
  });

  it("attaches the draft's document id to every decision", async () => {
    const { api, controller } = makeController();
    await controller.load();
    controller.decideTerm(1, "accept");
    await controller.settle();
    expect(api.posted[0].document_id).toBe("fake");
  });
});

describe("rollback on refusal", () => {
  it("a 422 relabel restores the pre-click card state", async () => {
    const { controller } = makeController();
    await controller.load();
    await controller.openTerm(1);
    const labelBefore = controller.state.detail!.label;
    controller.relabelTerm(1, "   ");
    await controller.settle();
    expect(controller.state.detail!.label).toBe(labelBefore);
    expect(controller.state.entries[0].label).toBe(labelBefore);
    expect(controller.state.toasts.some((t) => t.kind === "error")).toBe(true);
  });

  it("a rejected decision rolls back only its own card", async () => {
    const { api, controller } = makeController();
    await controller.load();
    api.failNext = { status: 404, message: "unknown subject" };
    controller.decideTerm(1, "accept");
    controller.decideTerm(2, "reject");
    await controller.settle();
    expect(controller.state.entries[0].decision_state).toBe("undecided");
    expect(controller.state.entries[1].decision_state).toBe("rejected");
    expect(api.posted).toHaveLength(1);
  });

  it("a 409 forces a full resync from the service", async () => {
    const { api, controller } = makeController();
    await controller.load();
    api.failNext = { status: 409, message: "stale draft" };
    controller.decideTerm(1, "accept");
    await controller.settle();
    // resynced from the fake: the decision was refused, so the server
    // still reports the term undecided
    expect(controller.state.entries[0].decision_state).toBe("undecided");
    expect(controller.state.toasts.at(-1)?.message).toMatch(/resync/);
  });
});

describe("offline behaviour", () => {
  it("keeps the queue and recovers on retry", async () => {
    const { api, controller } = makeController();
    await controller.load();
    api.offline = true;
    controller.decideTerm(1, "accept");
    controller.decideTerm(2, "accept");
    await new Promise((r) => setTimeout(r, 20));
    expect(controller.state.syncStatus).toBe("offline");
    expect(controller.state.queue).toHaveLength(2);

    api.offline = false;
    await controller.retry();
    await controller.settle();
    expect(api.posted).toHaveLength(2);
    expect(controller.state.queue).toHaveLength(0);
    expect(controller.state.syncStatus).toBe("idle");
  });
});

describe("refresh safety", () => {
  it("a fresh controller rebuilds the same view from the service alone", async () => {
    const { api, controller } = makeController();
    await controller.load();
    controller.decideTerm(1, "accept");
    controller.decideTerm(2, "reject");
    await controller.settle();

    const rebooted = new Controller(api);
    await rebooted.load();
    expect(rebooted.state.entries.map((e) => e.decision_state)).toEqual([
      "accepted",
      "rejected",
    ]);
    expect(rebooted.state.tallies).toEqual(controller.state.tallies);
  });
});

describe("detail interactions", () => {
  it("rejecting a relation removes it optimistically", async () => {
    const { api, controller } = makeController();
    await controller.load();
    await controller.openTerm(1);
    const subject = controller.state.detail!.relations[0].subject_id;
    controller.rejectRelation(subject);
    expect(controller.state.detail!.relations).toHaveLength(0);
    await controller.settle();
    expect(api.posted[0]).toMatchObject({
      subject_kind: "relation",
      subject_id: subject,
      action: "reject",
    });
  });

  it("missing terms render the not-found view", async () => {
    const { controller } = makeController();
    await controller.load();
    await controller.openTerm(404);
    expect(controller.state.detail).toBeNull();
    expect(controller.state.detailMissing).toBe(true);
  });
});

describe("export preview", () => {
  it("is exactly the service's bytes", async () => {
    const { api, controller } = makeController();
    api.exportBody = "Exact\t1-2\n\tBytes\t3\n";
    await controller.setTab("export");
    expect(controller.state.exportPreview).toBe(api.exportBody);
  });
});
