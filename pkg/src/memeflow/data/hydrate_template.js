// Self-contained content fetcher. Open this file's directory in a browser
// (or run with node >= 18), call run("<bearer token>"), and the script
// downloads the listed items from the platform's official API in batches.
// It carries identifiers only; no message content ships with this bundle.

"use strict";

const MODE = "__MODE__"; // "tweets" or "users"
const IDS = __IDS_JSON__;
const FIELDS = __FIELDS_JSON__;
const CHUNK_SIZE = __CHUNK_SIZE__;

const ENDPOINTS = {
  tweets: "https://api.twitter.com/2/tweets",
  users: "https://api.twitter.com/2/users",
};

async function fetchBatch(ids, token) {
  const params = new URLSearchParams({ ids: ids.join(",") });
  if (MODE === "tweets" && FIELDS.length) params.set("tweet.fields", FIELDS.join(","));
  if (MODE === "users" && FIELDS.length) params.set("user.fields", FIELDS.join(","));
  const response = await fetch(`${ENDPOINTS[MODE]}?${params}`, {
    headers: { Authorization: `Bearer ${token}` },
  });
  if (!response.ok) {
    throw new Error(`API request failed: ${response.status} ${response.statusText}`);
  }
  return response.json();
}

async function run(token) {
  if (!token) throw new Error("run(token) needs a bearer token for the official API");
  const results = [];
  for (let i = 0; i < IDS.length; i += CHUNK_SIZE) {
    const batch = IDS.slice(i, i + CHUNK_SIZE);
    const payload = await fetchBatch(batch, token);
    if (Array.isArray(payload.data)) results.push(...payload.data);
    console.log(`fetched ${Math.min(i + CHUNK_SIZE, IDS.length)} / ${IDS.length}`);
  }
  const blob = JSON.stringify(results, null, 2);
  if (typeof document !== "undefined") {
    const link = document.createElement("a");
    link.href = URL.createObjectURL(new Blob([blob], { type: "application/json" }));
    link.download = `${MODE}.json`;
    link.click();
  } else {
    const fs = await import("fs");
    fs.writeFileSync(`${MODE}.json`, blob);
  }
  return results;
}

if (typeof module !== "undefined") module.exports = { run, IDS, MODE, FIELDS };
