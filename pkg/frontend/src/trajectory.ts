/** Client-side assembly of trajectory documents in the engine's file format
 * ("housesim-traj/1"), byte-for-byte schema-compatible with files written by
 * the simulator itself: the CLI `replay --verify` accepts them unchanged.
 *
 * The recorder never derives state: every snapshot it stores arrived in a
 * server reply.
 */

import type { EventDoc, StateDoc, WorldDoc } from "./protocol.js";
import { stateOfWorld } from "./protocol.js";

export const TRAJ_FORMAT = "housesim-traj/1";

/** Event kinds that count as interaction events in the trajectory format.
 * Transient kinematic feedback (moved, blocked, turned, container-adjusted)
 * is displayed but not recorded. */
export const INTERACTION_KINDS: ReadonlySet<string> = new Set([
  "pick",
  "place",
  "set-state",
  "engaged",
  "disengaged",
  "no-target",
]);

export interface TrajectoryDoc {
  format: string;
  house_id: string;
  config?: Record<string, unknown>;
  start: WorldDoc;
  steps: { action: string; state: StateDoc }[];
  events: { step: number; event: EventDoc }[];
}

export class TrajectoryRecorder {
  private steps: { action: string; state: StateDoc }[] = [];
  private events: { step: number; event: EventDoc }[] = [];

  constructor(
    readonly houseId: string,
    readonly start: WorldDoc,
    readonly config?: Record<string, unknown>,
  ) {}

  get length(): number {
    return this.steps.length;
  }

  /** Record one step: the action sent, the world the server reported after
   * applying it, and the events from the action reply. */
  record(action: string, after: WorldDoc, events: EventDoc[] = []): void {
    const index = this.steps.length;
    this.steps.push({ action, state: stateOfWorld(after) });
    for (const event of events) {
      if (INTERACTION_KINDS.has(event.kind)) {
        this.events.push({ step: index, event });
      }
    }
  }

  document(): TrajectoryDoc {
    const doc: TrajectoryDoc = {
      format: TRAJ_FORMAT,
      house_id: this.houseId,
      start: this.start,
      steps: [...this.steps],
      events: [...this.events],
    };
    if (this.config !== undefined) doc.config = this.config;
    return doc;
  }

  /** Serialized file contents, ready for download or disk. */
  serialize(): string {
    return JSON.stringify(this.document());
  }
}

/** Parse a trajectory file for the replay viewer. Returns the document or
 * throws with a reason a user can act on. */
export function parseTrajectory(text: string): TrajectoryDoc {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (exc) {
    throw new Error(`not a JSON document: ${(exc as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new Error("trajectory document must be a JSON object");
  }
  const d = doc as Partial<TrajectoryDoc>;
  if (d.format !== TRAJ_FORMAT) {
    throw new Error(`expected format ${TRAJ_FORMAT}, got ${String(d.format)}`);
  }
  if (typeof d.house_id !== "string" || !d.start || !Array.isArray(d.steps)) {
    throw new Error("trajectory document is missing house_id, start, or steps");
  }
  return d as TrajectoryDoc;
}

/** State shown at viewer position i: 0 is the start state, i>0 is steps[i-1]. */
export function stateAt(doc: TrajectoryDoc, index: number): StateDoc {
  if (index < 0 || index > doc.steps.length) {
    throw new RangeError(`index ${index} outside 0..${doc.steps.length}`);
  }
  return index === 0 ? stateOfWorld(doc.start) : doc.steps[index - 1].state;
}
