/** Keyboard bindings: a bijection from physical keys onto the nine actions. */

import { ACTION_NAMES, type ActionName } from "./protocol.js";

/** Physical key identifiers follow KeyboardEvent.code ("KeyW", "ArrowUp",
 * "Space", ...). Two keys may not share an action except through the
 * documented aliases below, and every action has exactly one primary key. */
export const DEFAULT_BINDINGS: ReadonlyMap<string, ActionName> = new Map([
  ["KeyW", "move-forward"],
  ["KeyS", "move-back"],
  ["KeyA", "strafe-left"],
  ["KeyD", "strafe-right"],
  ["ArrowLeft", "look-left"],
  ["ArrowRight", "look-right"],
  ["ArrowUp", "look-up"],
  ["ArrowDown", "look-down"],
  ["Space", "interact"],
]);

/** Convenience aliases resolved before the binding table is consulted.
 * "E" is an alternate interact key by default; aliases never survive a
 * rebind of their target key. */
const DEFAULT_ALIASES: ReadonlyMap<string, string> = new Map([["KeyE", "Space"]]);

export class KeyBindings {
  private byKey: Map<string, ActionName>;
  private aliases: Map<string, string>;

  constructor(
    bindings: ReadonlyMap<string, ActionName> = DEFAULT_BINDINGS,
    aliases: ReadonlyMap<string, string> = DEFAULT_ALIASES,
  ) {
    this.byKey = new Map(bindings);
    this.aliases = new Map(aliases);
    this.checkBijection();
  }

  /** Map a physical key to its action; unbound keys yield null. */
  keyToAction(key: string): ActionName | null {
    const resolved = this.aliases.get(key) ?? key;
    return this.byKey.get(resolved) ?? null;
  }

  /** The primary key currently bound to an action. */
  keyFor(action: ActionName): string {
    for (const [key, bound] of this.byKey) {
      if (bound === action) return key;
    }
    // checkBijection guarantees every action has a key.
    throw new Error(`no key bound to ${action}`);
  }

  /** Rebind an action to a new key, preserving bijectivity: the action's old
   * key becomes unbound, and any alias routed at either key is dropped. If
   * the new key currently drives another action, the two keys swap. */
  rebind(action: ActionName, key: string): void {
    if (this.aliases.has(key)) this.aliases.delete(key);
    const oldKey = this.keyFor(action);
    if (oldKey === key) return;
    const displaced = this.byKey.get(key);
    this.byKey.delete(oldKey);
    this.byKey.set(key, action);
    if (displaced !== undefined) {
      this.byKey.set(oldKey, displaced);
    } else {
      for (const [alias, target] of this.aliases) {
        if (target === oldKey) this.aliases.delete(alias);
      }
    }
    this.checkBijection();
  }

  entries(): [string, ActionName][] {
    return [...this.byKey.entries()];
  }

  private checkBijection(): void {
    const actions = new Set(this.byKey.values());
    if (actions.size !== this.byKey.size) {
      throw new Error("two keys bound to the same action");
    }
    for (const action of ACTION_NAMES) {
      if (!actions.has(action)) throw new Error(`action ${action} is unbound`);
    }
    if (actions.size !== ACTION_NAMES.length) {
      throw new Error("binding table contains an unknown action");
    }
    for (const alias of this.aliases.keys()) {
      if (this.byKey.has(alias)) {
        throw new Error(`key ${alias} is both an alias and a binding`);
      }
    }
  }
}
