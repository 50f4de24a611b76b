import { beforeEach, describe, expect, it } from "vitest";

import { csvRowCount } from "../src/api.js";
import type { TableDoc } from "../src/types.js";

import { fixture, fixtureText, flush, mountApp, topMeme } from "./helpers.js";

function shownUserIds(): number[] {
  return [...document.querySelectorAll<HTMLTableRowElement>(".user-table tbody tr")].map(
    (row) => Number(row.dataset.userId),
  );
}

describe("user table", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("initially shows the API's default ordering", async () => {
    await mountApp();
    const meme = topMeme();
    const doc = fixture<TableDoc>(
      `/memes/${meme.kind}/${meme.path_value}/users?sort=user_id%3Aasc&offset=0&limit=25`,
    );
    expect(shownUserIds()).toEqual(doc.rows.map((r) => r.user_id));
    const status = document.querySelector(".table-status")!.textContent!;
    expect(status.endsWith(`of ${doc.total_matching}`)).toBe(true);
  });

  it("clicking a header reorders rows to match the API order", async () => {
    const app = await mountApp();
    const meme = topMeme();
    const header = document.querySelector<HTMLTableCellElement>(
      '.user-table th[data-field="retweets_received"]',
    )!;
    header.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await flush(8);
    const desc = fixture<TableDoc>(
      `/memes/${meme.kind}/${meme.path_value}/users?sort=retweets_received%3Adesc&offset=0&limit=25`,
    );
    expect(shownUserIds()).toEqual(desc.rows.map((r) => r.user_id));
    expect(app.table.query.sortDir).toBe("desc");

    // second click flips direction
    document
      .querySelector<HTMLTableCellElement>('.user-table th[data-field="retweets_received"]')!
      .dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await flush(8);
    const asc = fixture<TableDoc>(
      `/memes/${meme.kind}/${meme.path_value}/users?sort=retweets_received%3Aasc&offset=0&limit=25`,
    );
    expect(shownUserIds()).toEqual(asc.rows.map((r) => r.user_id));
  });

  it("name filter narrows rows to the API's filtered result", async () => {
    await mountApp();
    const meme = topMeme();
    const input = document.querySelector<HTMLInputElement>(".filter-name")!;
    input.value = "user_001";
    input.dispatchEvent(new Event("input", { bubbles: true }));
    await flush(8);
    const doc = fixture<TableDoc>(
      `/memes/${meme.kind}/${meme.path_value}/users` +
        `?filter=screen_name%3Acontains%3Auser_001&sort=user_id%3Aasc&offset=0&limit=25`,
    );
    expect(shownUserIds()).toEqual(doc.rows.map((r) => r.user_id));
    expect(doc.rows.every((r) => r.screen_name.includes("user_001"))).toBe(true);
  });

  it("csv download row count equals the displayed total_matching", async () => {
    const app = await mountApp();
    const meme = topMeme();
    const csv = fixtureText(
      `/export/users.csv?meme=${meme.kind}%3A${meme.path_value}&sort=user_id%3Aasc`,
    );
    const table = fixture<TableDoc>(
      `/memes/${meme.kind}/${meme.path_value}/users?sort=user_id%3Aasc&offset=0&limit=25`,
    );
    expect(app.exportUrl()).toBe(
      `/export/users.csv?meme=${meme.kind}%3A${meme.path_value}&sort=user_id%3Aasc`,
    );
    expect(csvRowCount(csv)).toBe(table.total_matching);
  });

  it("csv export respects the active filter", async () => {
    const app = await mountApp();
    const meme = topMeme();
    const input = document.querySelector<HTMLInputElement>(".filter-min-tweets")!;
    input.value = "2";
    input.dispatchEvent(new Event("input", { bubbles: true }));
    await flush(8);
    const url = app.exportUrl()!;
    expect(url).toContain("filter=total_tweets%3Agt%3A1");
    const filtered = fixture<TableDoc>(
      `/memes/${meme.kind}/${meme.path_value}/users` +
        `?filter=total_tweets%3Agt%3A1&sort=user_id%3Aasc&offset=0&limit=25`,
    );
    expect(csvRowCount(fixtureText(url))).toBe(filtered.total_matching);
  });

  it("row click opens the detail panel", async () => {
    const app = await mountApp();
    const first = document.querySelector<HTMLTableRowElement>(".user-table tbody tr")!;
    const userId = Number(first.dataset.userId);
    first.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await flush(8);
    expect(app.state.selectedUser).toBe(userId);
    expect(document.querySelector(".detail-panel h3")).not.toBeNull();
  });
});
