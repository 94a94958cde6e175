import { describe, expect, it } from "vitest";
import { MessageLog, ReplyError, SessionController, type Sender } from "../src/session.js";
import type { Reply, WorldDoc } from "../src/protocol.js";

function world(x: number): WorldDoc {
  return {
    format: "housesim-world/1",
    house: {
      format: "housesim/1",
      house_id: "bungalow",
      type_catalog: [],
      rooms: [{ room_id: "kitchen", floor_rect: [0, 0, 5, 4] }],
      doors: [],
    },
    agent: { x, z: 2, yaw: 0, pitch: 0, held: null, engaged: null },
    objects: [],
  };
}

/** Scripted fake server: serializes requests, answers like the real session. */
class FakeServer implements Sender {
  x = 2;
  inFlight = 0;
  maxInFlight = 0;
  requests: string[] = [];
  failAfter = Infinity;
  private nextId = 0;

  async send(tag: string, payload: Record<string, unknown> = {}): Promise<Reply> {
    this.inFlight += 1;
    this.maxInFlight = Math.max(this.maxInFlight, this.inFlight);
    this.requests.push(tag === "action" ? `action:${payload.name}` : tag);
    await new Promise((r) => setTimeout(r, 1));
    try {
      if (this.requests.length > this.failAfter) {
        throw new Error("connection reset");
      }
      const id = ++this.nextId;
      if (tag === "init") return { id, status: "ok", house_id: "bungalow" };
      if (tag === "state") return { id, status: "ok", world: world(this.x) };
      if (tag === "observe") {
        return {
          id,
          status: "ok",
          observation: { agent: world(this.x).agent, visible: [] },
        };
      }
      if (tag === "action") {
        if (payload.name === "interact") {
          return { id, status: "ok", events: [{ kind: "no-target" }] };
        }
        if (payload.name === "move-forward") {
          this.x += 0.25;
          return { id, status: "ok", events: [{ kind: "moved", distance: 0.25 }] };
        }
        return { id, status: "error", code: "unknown-action", message: String(payload.name) };
      }
      if (tag === "bye") return { id, status: "ok" };
      return { id, status: "error", code: "unknown-tag", message: tag };
    } finally {
      this.inFlight -= 1;
    }
  }
}

async function readySession(server: FakeServer): Promise<SessionController> {
  const c = new SessionController(server);
  await c.init({ houseId: "bungalow", seed: 0 });
  return c;
}

describe("SessionController", () => {
  it("init fetches the authoritative start state and observation", async () => {
    const server = new FakeServer();
    const c = await readySession(server);
    expect(server.requests).toEqual(["init", "state", "observe"]);
    expect(c.status).toBe("ready");
    expect(c.lastWorld?.agent.x).toBe(2);
    expect(c.lastObservation).not.toBeNull();
  });

  it("keys map to one action message each; unbound keys send nothing", async () => {
    const server = new FakeServer();
    const c = await readySession(server);
    expect(c.pressKey("KeyW")).toBe(true);
    expect(c.pressKey("KeyQ")).toBe(false);
    expect(c.pressKey("Space")).toBe(true);
    await c.drain();
    expect(server.requests.filter((r) => r.startsWith("action:"))).toEqual([
      "action:move-forward",
      "action:interact",
    ]);
  });

  it("queues actions with at most one request in flight, FIFO", async () => {
    const server = new FakeServer();
    const c = await readySession(server);
    for (let i = 0; i < 5; i++) c.pressKey("KeyW");
    c.pressKey("Space");
    expect(c.pending).toBeGreaterThan(0);
    await c.drain();
    expect(server.maxInFlight).toBe(1);
    const actions = server.requests.filter((r) => r.startsWith("action:"));
    expect(actions).toEqual([...Array(5).fill("action:move-forward"), "action:interact"]);
    expect(c.lastWorld?.agent.x).toBeCloseTo(3.25);
  });

  it("records one step per acknowledged action, with interaction events", async () => {
    const server = new FakeServer();
    const c = await readySession(server);
    c.pressKey("KeyW");
    c.pressKey("Space");
    await c.drain();
    const doc = JSON.parse(await c.finish());
    expect(doc.format).toBe("housesim-traj/1");
    expect(doc.steps.map((s: { action: string }) => s.action)).toEqual([
      "move-forward",
      "interact",
    ]);
    // the moved event is kinematic feedback, only no-target is recorded
    expect(doc.events).toEqual([{ step: 1, event: { kind: "no-target" } }]);
    expect(c.status).toBe("closed");
  });

  it("UI statelessness: every displayed state is verbatim from a reply", async () => {
    const log = new MessageLog();
    const server = new FakeServer();
    const c = new SessionController(server, { log });
    await c.init({ houseId: "bungalow" });
    for (let i = 0; i < 3; i++) c.pressKey("KeyW");
    await c.drain();
    // the displayed world object is one of the logged reply payloads, by identity
    const worlds = log.replies().flatMap((r) => (r.world ? [r.world] : []));
    expect(worlds).toContain(c.lastWorld);
    const observations = log
      .replies()
      .flatMap((r) => (r.observation ? [r.observation] : []));
    expect(observations).toContain(c.lastObservation);
    // and every recorded step snapshot came from a logged reply too
    const doc = JSON.parse(c.serializeTrajectory());
    for (const step of doc.steps) {
      expect(worlds.map((w) => w.agent.x)).toContain(step.state.agent.x);
    }
  });

  it("protocol errors keep the session alive and record nothing", async () => {
    const server = new FakeServer();
    const c = await readySession(server);
    c.enqueue("look-up" as never); // FakeServer rejects anything but move/interact
    await c.drain();
    expect(c.status).toBe("ready");
    expect(c.lastError).toMatch(/unknown-action/);
    expect(c.recordedSteps).toBe(0);
    c.pressKey("KeyW");
    await c.drain();
    expect(c.recordedSteps).toBe(1);
  });

  it("connection loss shows a banner state and preserves the buffer", async () => {
    const server = new FakeServer();
    const c = await readySession(server);
    c.pressKey("KeyW");
    await c.drain();
    server.failAfter = server.requests.length; // everything from here on dies
    c.pressKey("KeyW");
    c.pressKey("KeyW");
    await c.drain();
    expect(c.status).toBe("disconnected");
    expect(c.lastError).toMatch(/connection reset/);
    // the successful step is still downloadable
    const doc = JSON.parse(c.serializeTrajectory());
    expect(doc.steps).toHaveLength(1);
  });

  it("ReplyError carries the server reply", async () => {
    const err = new ReplyError({ id: 1, status: "error", code: "x", message: "y" });
    expect(err.reply.code).toBe("x");
    expect(err.message).toBe("x: y");
  });
});
