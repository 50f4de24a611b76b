import { afterEach, describe, expect, it } from "vitest";

import { ApiClient, csvRowCount, usersUrl } from "../src/api.js";

const realFetch = globalThis.fetch;

describe("api client", () => {
  afterEach(() => {
    globalThis.fetch = realFetch;
  });

  it("builds deterministic user-table urls", () => {
    const url = usersUrl(
      "hashtag",
      "blue5",
      {
        filters: ["total_tweets:gt:1", "screen_name:contains:u"],
        sortField: "polarity",
        sortDir: "desc",
        offset: 50,
        limit: 25,
      },
      0.3,
    );
    expect(url).toBe(
      "/memes/hashtag/blue5/users?filter=total_tweets%3Agt%3A1" +
        "&filter=screen_name%3Acontains%3Au&sort=polarity%3Adesc" +
        "&offset=50&limit=25&epsilon=0.3",
    );
  });

  it("discards stale responses by sequence number", async () => {
    const gates: ((value?: unknown) => void)[] = [];
    globalThis.fetch = (async () => {
      await new Promise((resolve) => gates.push(resolve));
      return new Response(JSON.stringify({ served: gates.length }), {
        status: 200,
        headers: { "content-type": "application/json" },
      });
    }) as typeof fetch;

    const api = new ApiClient();
    const first = api.latest<{ served: number }>("ch", "/a");
    const second = api.latest<{ served: number }>("ch", "/b");
    // the slow first response arrives after the second was issued
    gates[1]();
    const fresh = await second;
    gates[0]();
    const stale = await first;
    expect(stale).toBeNull();
    expect(fresh).not.toBeNull();
  });

  it("counts csv data rows with quoted newlines", () => {
    const text =
      'a,b\r\n1,"x\ny"\r\n2,plain\r\n';
    expect(csvRowCount(text)).toBe(2);
    expect(csvRowCount("a,b\r\n")).toBe(0);
  });
});
