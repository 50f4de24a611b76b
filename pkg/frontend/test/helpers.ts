import { readFileSync } from "fs";
import { join } from "path";

import { App } from "../src/app.js";
import type { MemeSummary, NetworkDoc } from "../src/types.js";

// vitest runs with the package root as cwd; jsdom rewrites import.meta.url,
// so fixture paths resolve through the filesystem instead.
const FIXTURES = join(process.cwd(), "fixtures");
const manifest: Record<string, string> = JSON.parse(
  readFileSync(join(FIXTURES, "manifest.json"), "utf-8"),
);

/** Replace global fetch with a replay of the recorded API responses. Any
 * URL the dashboard constructs that was not recorded fails the test. */
export function installFixtureFetch(): void {
  globalThis.fetch = (async (input: RequestInfo | URL) => {
    const url =
      typeof input === "string" ? input : input instanceof URL ? input.pathname + input.search : input.url;
    const name = manifest[url];
    if (!name) {
      throw new Error(`no fixture recorded for ${url}`);
    }
    const body = readFileSync(join(FIXTURES, name), "utf-8");
    const type = name.endsWith(".json") ? "application/json" : "text/csv";
    return new Response(body, { status: 200, headers: { "content-type": type } });
  }) as typeof fetch;
}

export function fixture<T>(url: string): T {
  const name = manifest[url];
  if (!name) throw new Error(`no fixture recorded for ${url}`);
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8")) as T;
}

export function fixtureText(url: string): string {
  const name = manifest[url];
  if (!name) throw new Error(`no fixture recorded for ${url}`);
  return readFileSync(join(FIXTURES, name), "utf-8");
}

export const MEMES_URL = "/memes?q=&sort=tweet_count&limit=50";

export function topMeme(): MemeSummary {
  return fixture<MemeSummary[]>(MEMES_URL)[0];
}

export function topNetwork(): NetworkDoc {
  const meme = topMeme();
  return fixture<NetworkDoc>(`/memes/${meme.kind}/${meme.path_value}/network?k=20`);
}

export async function mountApp(): Promise<App> {
  installFixtureFetch();
  document.body.innerHTML = '<div id="app"></div>';
  const app = new App(document.getElementById("app")!);
  await app.init();
  await app.selectMeme(topMeme());
  return app;
}

/** Let queued promise continuations (fire-and-forget refreshes) settle. */
export async function flush(times = 4): Promise<void> {
  for (let i = 0; i < times; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}
