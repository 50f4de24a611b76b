import { ApiClient, exportCsvUrl } from "./api.js";
import { DetailView } from "./detail.js";
import { NetworkView } from "./network.js";
import { TableView } from "./table.js";
import { TimeseriesView, pickWidth } from "./timeseries.js";
import type { MemeSummary, ViewState } from "./types.js";
import { defaultTableQuery, defaultViewState } from "./types.js";

function seconds(iso: string): number {
  return Math.floor(Date.parse(iso) / 1000);
}

/** Top-level controller: owns the view state, issues API queries, and keeps
 * the four panels (network, timeseries, table, detail) consistent. */
export class App {
  state: ViewState = defaultViewState();
  api: ApiClient;

  network: NetworkView;
  table: TableView;
  timeseries: TimeseriesView;
  detail: DetailView;

  private themeSelect: HTMLSelectElement;
  private searchInput: HTMLInputElement;
  private memeList: HTMLUListElement;
  private statsLine: HTMLElement;
  private epsilonSlider: HTMLInputElement;
  private epsilonLabel: HTMLElement;
  private kInput: HTMLInputElement;

  constructor(root: HTMLElement, api?: ApiClient) {
    this.api = api ?? new ApiClient();
    root.innerHTML = `
      <header class="topbar">
        <select class="theme-select"><option value="">all themes</option></select>
        <input class="meme-search" placeholder="search memes" />
        <label class="k-label">top <input class="k-input" type="number" min="1" value="20" /> users</label>
        <label class="epsilon-label">&epsilon;
          <input class="epsilon-slider" type="range" min="0" max="1" step="0.1" value="0" />
          <span class="epsilon-value">server default</span>
        </label>
      </header>
      <div class="layout">
        <nav><ul class="meme-list"></ul></nav>
        <main>
          <div class="stats-line"></div>
          <section class="network-panel"></section>
          <section class="timeseries-panel"></section>
          <section class="table-panel"></section>
        </main>
        <aside class="detail-panel"></aside>
      </div>`;

    this.themeSelect = root.querySelector(".theme-select")!;
    this.searchInput = root.querySelector(".meme-search")!;
    this.memeList = root.querySelector(".meme-list")!;
    this.statsLine = root.querySelector(".stats-line")!;
    this.epsilonSlider = root.querySelector(".epsilon-slider")!;
    this.epsilonLabel = root.querySelector(".epsilon-value")!;
    this.kInput = root.querySelector(".k-input")!;

    this.network = new NetworkView(root.querySelector(".network-panel")!);
    this.timeseries = new TimeseriesView(root.querySelector(".timeseries-panel")!);
    this.table = new TableView(root.querySelector(".table-panel")!, defaultTableQuery());
    this.detail = new DetailView(root.querySelector(".detail-panel")!);

    this.themeSelect.addEventListener("change", () => {
      this.state.theme = this.themeSelect.value || null;
      void this.refreshMemeList();
    });
    this.searchInput.addEventListener("input", () => void this.refreshMemeList());
    this.epsilonSlider.addEventListener("input", () =>
      this.setEpsilon(Number(this.epsilonSlider.value)),
    );
    this.kInput.addEventListener("change", () => {
      const k = Number(this.kInput.value);
      if (Number.isInteger(k) && k >= 1) {
        this.state.networkK = k;
        void this.refreshNetwork();
      }
    });
    this.network.onSelect = (userId) => void this.selectUser(userId);
    this.table.onSelect = (userId) => void this.selectUser(userId);
    this.table.onQueryChange = () => {
      this.state.table = this.table.query;
      void this.refreshTable();
    };
    this.table.onExport = () => this.downloadCsv();
    this.timeseries.onZoom = (t0, t1, w) => void this.refreshTimeseries(w, t0, t1);
    this.timeseries.onReset = () => void this.refreshTimeseries();
  }

  async init(): Promise<void> {
    const themes = await this.api.themes();
    for (const theme of themes) {
      const option = document.createElement("option");
      option.value = theme.name;
      option.textContent = `${theme.name} (${theme.n_memes})`;
      this.themeSelect.appendChild(option);
    }
    await this.refreshMemeList();
  }

  async refreshMemeList(): Promise<void> {
    const memes = await this.api.memes(this.searchInput.value.trim(), this.state.theme);
    this.memeList.textContent = "";
    for (const meme of memes) {
      const item = document.createElement("li");
      item.dataset.kind = meme.kind;
      item.dataset.pathValue = meme.path_value;
      item.textContent = `${meme.kind}:${meme.value} (${meme.tweet_count})`;
      item.addEventListener("click", () => void this.selectMeme(meme));
      this.memeList.appendChild(item);
    }
  }

  async selectMeme(meme: MemeSummary): Promise<void> {
    this.state.meme = meme;
    this.state.selectedUser = null;
    this.state.table = defaultTableQuery();
    this.table.query = this.state.table;
    this.detail.clear();
    const stats = await this.api.memeStats(meme.kind, meme.path_value);
    const most = stats.stats.most_retweeted_user;
    this.statsLine.textContent =
      `${meme.kind}:${meme.value} - ${stats.stats.n_tweets} tweets, ` +
      `${stats.stats.n_users} users, mean degree ${stats.stats.mean_degree.toFixed(2)}, ` +
      `largest component ${stats.stats.lcc_size}, ` +
      `${stats.stats.n_injection_points} injection points` +
      (most ? `, most retweeted @${most.screen_name} (${most.retweet_count})` : "");
    await Promise.all([
      this.refreshNetwork(),
      this.refreshTable(),
      this.refreshTimeseries(),
    ]);
  }

  async refreshNetwork(): Promise<void> {
    const meme = this.state.meme;
    if (!meme) return;
    const doc = await this.api.network(
      meme.kind,
      meme.path_value,
      this.state.networkK,
      this.state.epsilon,
    );
    if (doc) this.network.render(doc);
  }

  async refreshTable(): Promise<void> {
    const meme = this.state.meme;
    if (!meme) return;
    const doc = await this.api.users(
      meme.kind,
      meme.path_value,
      this.state.table,
      this.state.epsilon,
    );
    if (doc) this.table.render(doc);
  }

  async refreshTimeseries(
    w: number | null = null,
    t0: number | null = null,
    t1: number | null = null,
  ): Promise<void> {
    const meme = this.state.meme;
    if (!meme) return;
    const span = seconds(meme.last_seen) - seconds(meme.first_seen) + 1;
    const width = w ?? pickWidth(span);
    const doc = await this.api.timeseries(meme.kind, meme.path_value, width, t0, t1);
    if (doc) this.timeseries.render(doc, t0 !== null);
  }

  async selectUser(userId: number): Promise<void> {
    const meme = this.state.meme;
    if (!meme) return;
    this.state.selectedUser = userId;
    const [recent, metricsDoc] = await Promise.all([
      this.api.recent(userId),
      this.api.users(
        meme.kind,
        meme.path_value,
        { filters: [`user_id:eq:${userId}`], sortField: "user_id", sortDir: "asc", offset: 0, limit: 1 },
        this.state.epsilon,
        "detail",
      ),
    ]);
    this.detail.render(metricsDoc?.rows[0] ?? null, recent);
  }

  setEpsilon(epsilon: number): void {
    this.state.epsilon = epsilon;
    this.epsilonLabel.textContent = epsilon.toFixed(1);
    void this.refreshNetwork();
    void this.refreshTable();
  }

  abstainCount(): number {
    return this.table
      .rowsShown()
      .filter((row) => row.partisanship_label === "abstain").length;
  }

  exportUrl(): string | null {
    const meme = this.state.meme;
    if (!meme) return null;
    return exportCsvUrl(meme.kind, meme.path_value, this.state.table, this.state.epsilon);
  }

  private downloadCsv(): void {
    const url = this.exportUrl();
    if (!url) return;
    const anchor = document.createElement("a");
    anchor.href = url;
    anchor.download = "users.csv";
    document.body.appendChild(anchor);
    anchor.click();
    anchor.remove();
  }
}
