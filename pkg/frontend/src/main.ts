/** Browser entry point: wires the DOM to the session controller.
 *
 * Not imported by tests (it touches document/window); all logic worth
 * testing lives in the other modules.
 */

import { BridgeClient } from "./protocol.js";
import { SessionController } from "./session.js";
import { drawFirstPerson, drawTopDown } from "./render.js";
import { parseTrajectory, stateAt, type TrajectoryDoc } from "./trajectory.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
}

function ctx2d(canvas: HTMLCanvasElement): CanvasRenderingContext2D {
  const ctx = canvas.getContext("2d");
  if (ctx === null) throw new Error("2d context unavailable");
  return ctx;
}

const fpCanvas = byId<HTMLCanvasElement>("first-person");
const mapCanvas = byId<HTMLCanvasElement>("top-down");
const banner = byId<HTMLDivElement>("banner");
const eventsEl = byId<HTMLDivElement>("events");

let controller: SessionController | null = null;

function repaint(): void {
  if (controller === null) return;
  const obs = controller.lastObservation;
  if (obs?.raster) {
    drawFirstPerson(ctx2d(fpCanvas), obs.raster, fpCanvas.width, fpCanvas.height);
  }
  const world = controller.lastWorld;
  if (world) {
    drawTopDown(ctx2d(mapCanvas), world, mapCanvas.width, mapCanvas.height);
  }
  banner.textContent =
    controller.status === "disconnected"
      ? `connection lost: ${controller.lastError ?? "unknown"} — recording kept, download below`
      : `${controller.status} · ${controller.recordedSteps} steps recorded`;
  banner.className = controller.status === "disconnected" ? "banner error" : "banner";
  eventsEl.textContent = controller.lastEvents.map((e) => e.kind).join("  ");
}

byId<HTMLButtonElement>("connect").addEventListener("click", () => {
  void (async () => {
    const base = byId<HTMLInputElement>("bridge-url").value;
    const house = byId<HTMLInputElement>("house-id").value;
    const seed = Number(byId<HTMLInputElement>("seed").value || "0");
    try {
      const client = await BridgeClient.connect(base);
      controller = new SessionController(client);
      controller.onUpdate = repaint;
      await controller.init({ houseId: house, seed });
    } catch (exc) {
      banner.textContent = `connect failed: ${(exc as Error).message}`;
      banner.className = "banner error";
    }
  })();
});

window.addEventListener("keydown", (ev) => {
  if (controller === null) return;
  if (ev.target instanceof HTMLInputElement) return;
  if (controller.pressKey(ev.code)) ev.preventDefault();
});

byId<HTMLButtonElement>("finish").addEventListener("click", () => {
  void (async () => {
    if (controller === null) return;
    const file =
      controller.status === "disconnected"
        ? controller.serializeTrajectory()
        : await controller.finish();
    const blob = new Blob([file], { type: "application/json" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "trajectory.traj";
    a.click();
    URL.revokeObjectURL(a.href);
  })();
});

// --- replay viewer ------------------------------------------------------------

let loaded: TrajectoryDoc | null = null;
const slider = byId<HTMLInputElement>("replay-step");

byId<HTMLInputElement>("replay-file").addEventListener("change", (ev) => {
  void (async () => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    try {
      loaded = parseTrajectory(await file.text());
      slider.max = String(loaded.steps.length);
      slider.value = "0";
      showReplayStep(0);
    } catch (exc) {
      banner.textContent = `replay load failed: ${(exc as Error).message}`;
      banner.className = "banner error";
    }
  })();
});

slider.addEventListener("input", () => showReplayStep(Number(slider.value)));

function showReplayStep(index: number): void {
  if (loaded === null) return;
  const state = stateAt(loaded, index);
  drawTopDown(
    ctx2d(mapCanvas),
    { house: loaded.start.house, ...state },
    mapCanvas.width,
    mapCanvas.height,
  );
  banner.textContent = `replay ${index}/${loaded.steps.length} · ${loaded.house_id}`;
  banner.className = "banner";
}
