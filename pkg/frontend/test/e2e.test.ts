/** End-to-end recording: a scripted key sequence drives the real server over
 * the HTTP bridge, and the downloaded trajectory file must satisfy the
 * engine's own `replay --verify`.
 */

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { BridgeClient } from "../src/protocol.js";
import { MessageLog, SessionController } from "../src/session.js";

const PYTHON = process.env.HOUSESIM_PYTHON ?? "python3";

let server: ChildProcess;
let bridgeUrl: string;
let workdir: string;

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "housesim-e2e-"));
  server = spawn(PYTHON, ["-m", "housesim.cli", "serve", "--port", "0", "--bridge-port", "0"], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  const banner = await new Promise<string>((resolve, reject) => {
    let buf = "";
    const timer = setTimeout(() => reject(new Error(`no banner; stderr: ${err}`)), 30_000);
    let err = "";
    server.stderr!.on("data", (chunk: Buffer) => (err += chunk.toString()));
    server.stdout!.on("data", (chunk: Buffer) => {
      buf += chunk.toString();
      const line = buf.indexOf("\n");
      if (line >= 0) {
        clearTimeout(timer);
        resolve(buf.slice(0, line));
      }
    });
    server.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`server exited early (${code}); stderr: ${err}`));
    });
  });
  const info = JSON.parse(banner) as { port: number; bridge_port: number; houses: string[] };
  expect(info.houses).toContain("bungalow");
  bridgeUrl = `http://127.0.0.1:${info.bridge_port}`;
}, 40_000);

afterAll(() => {
  server?.kill();
  if (workdir) rmSync(workdir, { recursive: true, force: true });
});

// a walk with turns, pitch changes, and an interact attempt: enough to
// exercise movement, look quantization, and event recording in one file
const SCRIPT = [
  "KeyW",
  "KeyW",
  "KeyW",
  "ArrowRight",
  "ArrowRight",
  "KeyW",
  "KeyD",
  "ArrowDown",
  "Space",
  "ArrowUp",
  "KeyS",
  "ArrowLeft",
  "KeyA",
  "KeyE",
];

describe("end-to-end recording", () => {
  it("a scripted key sequence yields a file the engine verifies", async () => {
    const log = new MessageLog();
    const client = await BridgeClient.connect(bridgeUrl);
    const controller = new SessionController(client, { log });
    await controller.init({ houseId: "bungalow", seed: 11 });

    let sent = 0;
    for (const key of SCRIPT) {
      if (controller.pressKey(key)) sent += 1;
    }
    expect(sent).toBe(SCRIPT.length); // every scripted key is bound
    await controller.drain();
    expect(controller.status).toBe("ready");
    expect(controller.recordedSteps).toBe(SCRIPT.length);

    // UI statelessness: the displayed world/observation are reply payloads
    // from the intercepted message log, by object identity
    const replies = log.replies();
    expect(replies.every((r) => typeof r.id === "number")).toBe(true);
    expect(replies.flatMap((r) => (r.world ? [r.world] : []))).toContain(
      controller.lastWorld,
    );
    expect(
      replies.flatMap((r) => (r.observation ? [r.observation] : [])),
    ).toContain(controller.lastObservation);

    const file = await controller.finish();
    const doc = JSON.parse(file) as { steps: { action: string }[] };
    expect(doc.steps.map((s) => s.action)).toEqual([
      "move-forward",
      "move-forward",
      "move-forward",
      "look-right",
      "look-right",
      "move-forward",
      "strafe-right",
      "look-down",
      "interact",
      "look-up",
      "move-back",
      "look-left",
      "strafe-left",
      "interact",
    ]);

    const path = join(workdir, "webui-run.traj");
    writeFileSync(path, file);
    const result = spawnSync(
      PYTHON,
      ["-m", "housesim.cli", "replay", "--traj", path, "--verify"],
      { encoding: "utf-8", timeout: 60_000 },
    );
    expect(result.stderr).toBe("");
    expect(JSON.parse(result.stdout).verified).toBe(true);
    expect(result.status).toBe(0);
  }, 60_000);

  it("replay (non-verify) reports the same final agent pose the UI shows", async () => {
    const client = await BridgeClient.connect(bridgeUrl);
    const controller = new SessionController(client);
    await controller.init({ houseId: "loft", seed: 3 });
    for (const key of ["KeyW", "ArrowLeft", "KeyW"]) controller.pressKey(key);
    await controller.drain();
    const file = await controller.finish();
    const path = join(workdir, "webui-short.traj");
    writeFileSync(path, file);
    const result = spawnSync(
      PYTHON,
      ["-m", "housesim.cli", "replay", "--traj", path],
      { encoding: "utf-8", timeout: 60_000 },
    );
    expect(result.status).toBe(0);
    const final = JSON.parse(result.stdout).final_agent;
    expect(final.x).toBe(controller.lastWorld!.agent.x);
    expect(final.z).toBe(controller.lastWorld!.agent.z);
    expect(final.yaw).toBe(controller.lastWorld!.agent.yaw);
  }, 60_000);
});
