// Payload shapes of the analytics HTTP API. The dashboard never computes
// statistics itself; every number shown comes from one of these documents.

export interface MemeRef {
  kind: string;
  value: string;
}

export interface MemeSummary extends MemeRef {
  path_value: string;
  tweet_count: number;
  user_count: number;
  first_seen: string;
  last_seen: string;
}

export interface ThemeSummary {
  name: string;
  n_memes: number;
  rules: string[];
}

export interface NetworkNode {
  user_id: number;
  screen_name: string;
  out_degree: number;
  node_area: number;
  partisan_color_class: "left" | "right" | "abstain" | "n/a";
}

export interface NetworkEdge {
  src: number;
  dst: number;
  edge_class: "retweet" | "mention";
  weight: number;
  retweet_weight: number;
  line_width: number;
}

export interface NetworkDoc {
  meme: MemeRef;
  k: number;
  nodes: NetworkNode[];
  edges: NetworkEdge[];
}

export interface MemeStats {
  n_users: number;
  n_tweets: number;
  mean_degree: number;
  lcc_size: number;
  most_retweeted_user: {
    user_id: number;
    screen_name: string;
    retweet_count: number;
  } | null;
  n_injection_points: number;
  retweet_events: number;
  mention_events: number;
  mean_polarity: number;
}

export interface MemeStatsDoc extends MemeSummary {
  stats: MemeStats;
}

export interface TimeseriesDoc {
  meme: MemeRef;
  bucket_width: number;
  origin: number;
  t0: number;
  t1: number;
  counts: number[];
}

export interface UserRow {
  user_id: number;
  screen_name: string;
  total_tweets: number;
  retweets_made: number;
  retweets_received: number;
  mentions_made: number;
  mentions_received: number;
  language: string;
  polarity: number;
  pos_hits: number;
  neg_hits: number;
  partisanship_label: "left" | "right" | "abstain" | "n/a";
  partisanship_distance: number | null;
  partisanship_confidence: number | null;
  last_active: string;
  account_created_at: string;
}

export interface TableDoc {
  meme: MemeRef;
  rows: UserRow[];
  total_matching: number;
  offset: number;
  limit: number;
}

export interface RecentDoc {
  user_id: number;
  screen_name: string;
  tweets: { tweet_id: number; created_at: string; text: string; is_retweet: boolean }[];
}

export interface TableQueryState {
  filters: string[]; // field:op:value, conjunctive
  sortField: string;
  sortDir: "asc" | "desc";
  offset: number;
  limit: number;
}

export interface ViewState {
  theme: string | null;
  meme: MemeSummary | null;
  networkK: number;
  epsilon: number | null; // null = server default
  table: TableQueryState;
  selectedUser: number | null;
}

export function defaultTableQuery(): TableQueryState {
  return { filters: [], sortField: "user_id", sortDir: "asc", offset: 0, limit: 25 };
}

export function defaultViewState(): ViewState {
  return {
    theme: null,
    meme: null,
    networkK: 20,
    epsilon: null,
    table: defaultTableQuery(),
    selectedUser: null,
  };
}
