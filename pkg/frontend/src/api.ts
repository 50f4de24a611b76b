import type {
  MemeStatsDoc,
  MemeSummary,
  NetworkDoc,
  RecentDoc,
  TableDoc,
  TableQueryState,
  ThemeSummary,
  TimeseriesDoc,
} from "./types.js";

// URL construction is centralized here and kept deterministic (fixed query
// parameter order) so that recorded fixtures replay byte-for-byte in tests.

function enc(value: string): string {
  return encodeURIComponent(value);
}

export function memesUrl(q: string, theme: string | null, limit = 50): string {
  let url = `/memes?q=${enc(q)}&sort=tweet_count&limit=${limit}`;
  if (theme !== null) url += `&theme=${enc(theme)}`;
  return url;
}

export function memeBase(kind: string, pathValue: string): string {
  return `/memes/${enc(kind)}/${enc(pathValue)}`;
}

export function networkUrl(
  kind: string,
  pathValue: string,
  k: number,
  epsilon: number | null,
): string {
  let url = `${memeBase(kind, pathValue)}/network?k=${k}`;
  if (epsilon !== null) url += `&epsilon=${epsilon}`;
  return url;
}

export function timeseriesUrl(
  kind: string,
  pathValue: string,
  w: number,
  t0: number | null = null,
  t1: number | null = null,
): string {
  let url = `${memeBase(kind, pathValue)}/timeseries?w=${w}`;
  if (t0 !== null) url += `&t0=${t0}`;
  if (t1 !== null) url += `&t1=${t1}`;
  return url;
}

export function usersUrl(
  kind: string,
  pathValue: string,
  query: TableQueryState,
  epsilon: number | null,
): string {
  const parts: string[] = [];
  for (const filter of query.filters) parts.push(`filter=${enc(filter)}`);
  parts.push(`sort=${enc(`${query.sortField}:${query.sortDir}`)}`);
  parts.push(`offset=${query.offset}`);
  parts.push(`limit=${query.limit}`);
  if (epsilon !== null) parts.push(`epsilon=${epsilon}`);
  return `${memeBase(kind, pathValue)}/users?${parts.join("&")}`;
}

export function exportCsvUrl(
  kind: string,
  pathValue: string,
  query: TableQueryState,
  epsilon: number | null,
): string {
  const parts: string[] = [`meme=${enc(`${kind}:${pathValue}`)}`];
  for (const filter of query.filters) parts.push(`filter=${enc(filter)}`);
  parts.push(`sort=${enc(`${query.sortField}:${query.sortDir}`)}`);
  if (epsilon !== null) parts.push(`epsilon=${epsilon}`);
  return `/export/users.csv?${parts.join("&")}`;
}

export function recentUrl(userId: number): string {
  return `/users/${userId}/recent`;
}

/**
 * Thin fetch wrapper. Responses are matched to the newest request per
 * channel; anything stale (an older sequence number) is discarded, so slow
 * responses can never overwrite fresher state.
 */
export class ApiClient {
  private seq: Record<string, number> = {};

  constructor(private baseUrl = "") {}

  private async get<T>(url: string): Promise<T> {
    const response = await fetch(this.baseUrl + url);
    if (!response.ok) {
      throw new Error(`GET ${url} -> ${response.status}`);
    }
    return (await response.json()) as T;
  }

  /** GET that resolves to null when a newer request on `channel` started. */
  async latest<T>(channel: string, url: string): Promise<T | null> {
    const ticket = (this.seq[channel] = (this.seq[channel] ?? 0) + 1);
    const body = await this.get<T>(url);
    return this.seq[channel] === ticket ? body : null;
  }

  themes(): Promise<ThemeSummary[]> {
    return this.get("/themes");
  }

  memes(q: string, theme: string | null): Promise<MemeSummary[]> {
    return this.get(memesUrl(q, theme));
  }

  memeStats(kind: string, pathValue: string): Promise<MemeStatsDoc> {
    return this.get(memeBase(kind, pathValue));
  }

  network(
    kind: string,
    pathValue: string,
    k: number,
    epsilon: number | null,
  ): Promise<NetworkDoc | null> {
    return this.latest("network", networkUrl(kind, pathValue, k, epsilon));
  }

  timeseries(
    kind: string,
    pathValue: string,
    w: number,
    t0: number | null = null,
    t1: number | null = null,
  ): Promise<TimeseriesDoc | null> {
    return this.latest("timeseries", timeseriesUrl(kind, pathValue, w, t0, t1));
  }

  users(
    kind: string,
    pathValue: string,
    query: TableQueryState,
    epsilon: number | null,
    channel = "users",
  ): Promise<TableDoc | null> {
    return this.latest(channel, usersUrl(kind, pathValue, query, epsilon));
  }

  recent(userId: number): Promise<RecentDoc> {
    return this.get(recentUrl(userId));
  }

  csvText(url: string): Promise<string> {
    return fetch(this.baseUrl + url).then((r) => {
      if (!r.ok) throw new Error(`GET ${url} -> ${r.status}`);
      return r.text();
    });
  }
}

/** Data rows of an RFC-4180 CSV document (quotes-aware, header excluded). */
export function csvRowCount(text: string): number {
  let rows = 0;
  let inQuotes = false;
  let sawAny = false;
  for (let i = 0; i < text.length; i++) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') i++;
        else inQuotes = false;
      }
      continue;
    }
    if (ch === '"') inQuotes = true;
    else if (ch === "\n") {
      rows++;
      sawAny = false;
    } else if (ch !== "\r") sawAny = true;
  }
  if (sawAny) rows++;
  return Math.max(0, rows - 1); // minus the header row
}
