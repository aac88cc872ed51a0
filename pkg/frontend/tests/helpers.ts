import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export async function waitFor(
  predicate: () => boolean,
  timeoutMs = 10_000,
  stepMs = 25,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) return;
    await new Promise((resolve) => setTimeout(resolve, stepMs));
  }
  throw new Error("waitFor timed out");
}

export interface ServiceHandle {
  baseUrl: string;
  stop(): void;
}

/** Spawns the real session service on a scratch data dir. */
export async function startService(port: number): Promise<ServiceHandle> {
  const dataDir = mkdtempSync(join(tmpdir(), "haggle-playground-"));
  const child: ChildProcess = spawn(
    "python3",
    ["-m", "haggle.cli", "serve", "--port", String(port), "--data-dir", dataDir],
    { stdio: "ignore" },
  );
  const baseUrl = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${baseUrl}/api/v1/health`);
      if (response.ok) {
        return { baseUrl, stop: () => child.kill() };
      }
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  child.kill();
  throw new Error("service did not become healthy");
}

export function fillInput(form: HTMLElement, name: string, value: string): void {
  const input = form.querySelector<HTMLInputElement>(`input[name="${name}"]`);
  if (!input) throw new Error(`no input named ${name}`);
  input.value = value;
}

export function submit(form: HTMLFormElement): void {
  form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}
