import { beforeEach, describe, expect, it } from "vitest";

import type { NetworkDoc, TableDoc } from "../src/types.js";

import { fixture, flush, mountApp, topMeme } from "./helpers.js";

const GRID = [0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1];

describe("epsilon slider", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("re-requests predictions and abstain count never decreases", async () => {
    const app = await mountApp();
    const slider = document.querySelector<HTMLInputElement>(".epsilon-slider")!;
    let previous = -1;
    for (const eps of GRID) {
      slider.value = String(eps);
      slider.dispatchEvent(new Event("input", { bubbles: true }));
      await flush(8);
      expect(app.state.epsilon).toBe(eps);
      const abstained = app.abstainCount();
      expect(abstained).toBeGreaterThanOrEqual(previous);
      previous = abstained;
    }
  });

  it("table rows match the API response at each epsilon", async () => {
    const app = await mountApp();
    const meme = topMeme();
    for (const eps of [0, 0.3, 0.7]) {
      app.setEpsilon(eps);
      await flush(8);
      const doc = fixture<TableDoc>(
        `/memes/${meme.kind}/${meme.path_value}/users` +
          `?sort=user_id%3Aasc&offset=0&limit=25&epsilon=${eps}`,
      );
      const labels = [
        ...document.querySelectorAll<HTMLTableRowElement>(".user-table tbody tr"),
      ].map((row) => row.cells[8].textContent);
      expect(labels).toEqual(doc.rows.map((r) => r.partisanship_label));
    }
  });

  it("network node colors re-request with epsilon but node set is stable", async () => {
    const app = await mountApp();
    const meme = topMeme();
    const baseline = new Set(app.network.nodeIds());
    for (const eps of [0, 0.5, 1]) {
      app.setEpsilon(eps);
      await flush(8);
      const doc = fixture<NetworkDoc>(
        `/memes/${meme.kind}/${meme.path_value}/network?k=20&epsilon=${eps}`,
      );
      expect(new Set(app.network.nodeIds())).toEqual(baseline);
      const abstainFixture = doc.nodes.filter(
        (n) => n.partisan_color_class === "abstain",
      ).length;
      const abstainRendered = document.querySelectorAll(
        '.network-svg circle[fill="#999999"]',
      ).length;
      expect(abstainRendered).toBe(abstainFixture);
    }
  });
});
