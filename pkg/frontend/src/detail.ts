import type { RecentDoc, UserRow } from "./types.js";

const FIELDS: (keyof UserRow & string)[] = [
  "user_id",
  "screen_name",
  "total_tweets",
  "retweets_made",
  "retweets_received",
  "mentions_made",
  "mentions_received",
  "language",
  "polarity",
  "partisanship_label",
  "partisanship_confidence",
  "last_active",
  "account_created_at",
];

/** Detail panel for a clicked node or table row: the user's metrics row in
 * declaration order plus their recent activity feed. */
export class DetailView {
  constructor(private container: HTMLElement) {
    container.classList.add("hidden");
  }

  clear(): void {
    this.container.classList.add("hidden");
    this.container.textContent = "";
  }

  render(metrics: UserRow | null, recent: RecentDoc): void {
    this.container.classList.remove("hidden");
    this.container.textContent = "";
    const heading = document.createElement("h3");
    heading.textContent = `@${recent.screen_name}`;
    this.container.appendChild(heading);

    if (metrics) {
      const list = document.createElement("dl");
      list.className = "metrics";
      for (const field of FIELDS) {
        const value = metrics[field];
        const dt = document.createElement("dt");
        dt.textContent = field;
        const dd = document.createElement("dd");
        dd.dataset.field = field;
        dd.textContent =
          value === null || value === undefined
            ? ""
            : typeof value === "number" && !Number.isInteger(value)
              ? value.toFixed(3)
              : String(value);
        list.append(dt, dd);
      }
      this.container.appendChild(list);
    }

    const feed = document.createElement("ul");
    feed.className = "recent-feed";
    for (const tweet of recent.tweets) {
      const item = document.createElement("li");
      const stamp = document.createElement("time");
      stamp.textContent = tweet.created_at;
      const body = document.createElement("span");
      body.textContent = (tweet.is_retweet ? "↻ " : "") + tweet.text;
      item.append(stamp, body);
      feed.appendChild(item);
    }
    this.container.appendChild(feed);
  }
}
