/** Session controller: the single event loop between keyboard and bridge.
 *
 * Concurrency model: at most one request is in flight; key presses queue
 * client-side and drain FIFO, so the per-connection ordering of the protocol
 * stays trivial. The controller is a pure view over server replies — it
 * never simulates locally, and every state it exposes was received verbatim
 * in a reply (auditable through the message log).
 */

import type {
  ActionName,
  EventDoc,
  Message,
  ObservationDoc,
  Reply,
  WorldDoc,
} from "./protocol.js";
import { KeyBindings } from "./keys.js";
import { TrajectoryRecorder } from "./trajectory.js";

export interface Sender {
  send(tag: string, payload?: Record<string, unknown>): Promise<Reply>;
}

export interface LogEntry {
  direction: "send" | "recv";
  message: Message | Reply;
}

/** Every message either way passes through here; tests intercept it to prove
 * displayed state is traceable to a server response. */
export class MessageLog {
  readonly entries: LogEntry[] = [];

  sent(message: Message): void {
    this.entries.push({ direction: "send", message });
  }

  received(message: Reply): void {
    this.entries.push({ direction: "recv", message });
  }

  replies(): Reply[] {
    return this.entries
      .filter((e) => e.direction === "recv")
      .map((e) => e.message as Reply);
  }
}

/** The server answered, but with status "error"; the session stays alive. */
export class ReplyError extends Error {
  constructor(readonly reply: Reply) {
    super(`${reply.code ?? "error"}: ${reply.message ?? ""}`);
    this.name = "ReplyError";
  }
}

export interface InitOptions {
  houseId: string;
  seed?: number;
  scenario?: { type: string; count: number }[];
  obs?: { width?: number; height?: number; hfov?: number; far?: number };
}

export type SessionStatus = "idle" | "ready" | "busy" | "disconnected" | "closed";

export class SessionController {
  readonly bindings: KeyBindings;
  readonly log: MessageLog;

  private queue: ActionName[] = [];
  private inFlight = false;
  private recorder: TrajectoryRecorder | null = null;

  /** Displayed state. Assigned only from server replies. */
  lastWorld: WorldDoc | null = null;
  lastObservation: ObservationDoc | null = null;
  lastEvents: EventDoc[] = [];
  status: SessionStatus = "idle";
  /** Set when the connection drops; the recorded buffer stays downloadable. */
  lastError: string | null = null;

  /** Called after every state change so the UI can repaint. */
  onUpdate: () => void = () => {};

  constructor(
    private readonly sender: Sender,
    options: { bindings?: KeyBindings; log?: MessageLog } = {},
  ) {
    this.bindings = options.bindings ?? new KeyBindings();
    this.log = options.log ?? new MessageLog();
  }

  /** Init a house, fetch the authoritative start state, start recording. */
  async init(options: InitOptions): Promise<void> {
    const payload: Record<string, unknown> = { house_id: options.houseId };
    if (options.seed !== undefined) payload.seed = options.seed;
    if (options.scenario !== undefined) payload.scenario = options.scenario;
    if (options.obs !== undefined) payload.obs = options.obs;
    await this.request("init", payload);
    const state = await this.request("state");
    const world = state.world as WorldDoc;
    this.lastWorld = world;
    this.recorder = new TrajectoryRecorder(world.house.house_id, world);
    const obs = await this.request("observe");
    this.lastObservation = obs.observation ?? null;
    this.status = "ready";
    this.onUpdate();
  }

  /** Keyboard entry point: unbound keys are ignored (no message is sent). */
  pressKey(key: string): boolean {
    const action = this.bindings.keyToAction(key);
    if (action === null) return false;
    this.enqueue(action);
    return true;
  }

  /** Queue an action; the queue drains one request at a time. */
  enqueue(action: ActionName): void {
    this.queue.push(action);
    void this.pump();
  }

  /** Resolves when every queued action has been acknowledged. */
  async drain(): Promise<void> {
    while (this.queue.length > 0 || this.inFlight) {
      await new Promise((resolve) => setTimeout(resolve, 1));
    }
  }

  get pending(): number {
    return this.queue.length + (this.inFlight ? 1 : 0);
  }

  /** The recorded trajectory file contents (always available, even after a
   * connection loss). */
  serializeTrajectory(): string {
    if (this.recorder === null) throw new Error("no session recorded");
    return this.recorder.serialize();
  }

  get recordedSteps(): number {
    return this.recorder?.length ?? 0;
  }

  /** Politely end the session. The local buffer survives. */
  async finish(): Promise<string> {
    const file = this.serializeTrajectory();
    if (this.status !== "disconnected") {
      try {
        await this.request("bye");
        this.status = "closed";
      } catch {
        this.status = "disconnected";
      }
    }
    this.onUpdate();
    return file;
  }

  private async pump(): Promise<void> {
    if (this.inFlight) return;
    const action = this.queue.shift();
    if (action === undefined) return;
    this.inFlight = true;
    this.status = "busy";
    try {
      const reply = await this.request("action", { name: action, observe: true });
      const events = reply.events ?? [];
      // steps store full snapshots, so fetch the authoritative post-action
      // state rather than trusting any local bookkeeping
      const state = await this.request("state");
      const world = state.world as WorldDoc;
      this.recorder?.record(action, world, events);
      this.lastWorld = world;
      this.lastObservation = reply.observation ?? this.lastObservation;
      this.lastEvents = events;
      this.status = "ready";
    } catch (exc) {
      if (exc instanceof ReplyError) {
        // protocol-level rejection: session still alive, nothing recorded
        this.lastError = exc.message;
        this.status = "ready";
      } else {
        this.status = "disconnected";
        this.lastError = (exc as Error).message;
        this.queue.length = 0;
      }
    } finally {
      this.inFlight = false;
    }
    this.onUpdate();
    if (this.status === "ready") void this.pump();
  }

  private async request(tag: string, payload: Record<string, unknown> = {}): Promise<Reply> {
    this.log.sent({ tag, ...payload });
    const reply = await this.sender.send(tag, payload);
    this.log.received(reply);
    if (reply.status !== "ok") {
      throw new ReplyError(reply);
    }
    return reply;
  }
}
