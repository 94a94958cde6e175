/** Wire types and HTTP-bridge client for the housesim protocol.
 *
 * The bridge speaks one JSON message per POST:
 *   POST {base}/session            -> {"session": token}
 *   POST {base}/session/{token}    body: message, response: one reply
 * Message and reply schemas are identical to the raw stream protocol.
 */

export const PROTOCOL = "housesim/1";

export type ActionName =
  | "move-forward"
  | "move-back"
  | "strafe-left"
  | "strafe-right"
  | "look-left"
  | "look-right"
  | "look-up"
  | "look-down"
  | "interact";

export const ACTION_NAMES: readonly ActionName[] = [
  "move-forward",
  "move-back",
  "strafe-left",
  "strafe-right",
  "look-left",
  "look-right",
  "look-up",
  "look-down",
  "interact",
];

export interface AgentDoc {
  x: number;
  z: number;
  yaw: number;
  pitch: number;
  held: string | null;
  engaged: string | null;
}

export interface ObjectDoc {
  instance_id: string;
  type: string;
  location: Record<string, unknown>;
  yaw?: number;
  open_fraction?: number;
  toggle_state?: number | string | null;
  height_offset?: number;
}

/** Dynamic snapshot: the per-step payload of a trajectory file. */
export interface StateDoc {
  agent: AgentDoc;
  objects: ObjectDoc[];
}

export interface WorldDoc extends StateDoc {
  format: string;
  house: HouseDoc;
}

export interface RoomDoc {
  room_id: string;
  floor_rect: number[];
  surfaces?: unknown[];
}

export interface DoorDoc {
  door_id: string;
  rooms: [string, string];
  anchor: [number, number];
  width: number;
}

export interface TypeDoc {
  type_id: string;
  display_name: string;
  class: string;
  half_extents: number[];
}

export interface HouseDoc {
  format: string;
  house_id: string;
  type_catalog: TypeDoc[];
  rooms: RoomDoc[];
  doors: DoorDoc[];
}

export interface RasterDoc {
  width: number;
  height: number;
  labels: string[][];
  depth: number[][];
}

export interface VisibleDoc {
  id: string;
  type: string;
  class: string;
  bearing: number;
  elevation: number;
  distance: number;
  open_fraction?: number;
  toggle_state?: number | string;
}

export interface ObservationDoc {
  agent: AgentDoc;
  visible: VisibleDoc[];
  raster?: RasterDoc;
}

export interface EventDoc {
  kind: string;
  [key: string]: unknown;
}

export interface Message {
  id?: number;
  tag: string;
  [key: string]: unknown;
}

export interface Reply {
  id: number | null;
  status: "ok" | "error";
  code?: string;
  message?: string;
  events?: EventDoc[];
  observation?: ObservationDoc;
  world?: WorldDoc;
  [key: string]: unknown;
}

export type FetchLike = (
  url: string,
  init: { method: string; body?: string; headers?: Record<string, string> },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class BridgeError extends Error {
  constructor(
    message: string,
    readonly status?: number,
  ) {
    super(message);
    this.name = "BridgeError";
  }
}

/** One bridge session: allocates a token, then relays messages one per POST.
 *
 * Assigns monotonically increasing ids and checks the reply echoes the id of
 * the request, so a caller can trust reply/request pairing.
 */
export class BridgeClient {
  private nextId = 1;

  private constructor(
    readonly baseUrl: string,
    readonly token: string,
    private readonly fetchImpl: FetchLike,
  ) {}

  static async connect(
    baseUrl: string,
    fetchImpl: FetchLike = globalThis.fetch as unknown as FetchLike,
  ): Promise<BridgeClient> {
    const base = baseUrl.replace(/\/+$/, "");
    const resp = await fetchImpl(`${base}/session`, { method: "POST" });
    if (!resp.ok) {
      throw new BridgeError(`session allocation failed: ${resp.status}`, resp.status);
    }
    const doc = (await resp.json()) as { session?: string };
    if (typeof doc.session !== "string" || doc.session.length === 0) {
      throw new BridgeError("bridge reply lacks a session token");
    }
    return new BridgeClient(base, doc.session, fetchImpl);
  }

  /** Send one message; resolves with the single reply. */
  async send(tag: string, payload: Record<string, unknown> = {}): Promise<Reply> {
    const id = this.nextId++;
    const message: Message = { id, tag, ...payload };
    const resp = await this.fetchImpl(`${this.baseUrl}/session/${this.token}`, {
      method: "POST",
      body: JSON.stringify(message),
      headers: { "content-type": "application/json" },
    });
    if (!resp.ok) {
      throw new BridgeError(`bridge returned ${resp.status}`, resp.status);
    }
    const reply = (await resp.json()) as Reply;
    if (reply.id !== id) {
      throw new BridgeError(`reply id ${reply.id} does not match request id ${id}`);
    }
    return reply;
  }
}

/** Strip a full world document down to the dynamic snapshot stored per step. */
export function stateOfWorld(world: WorldDoc): StateDoc {
  return { agent: world.agent, objects: world.objects };
}
