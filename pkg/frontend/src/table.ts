import type { TableDoc, TableQueryState, UserRow } from "./types.js";

const COLUMNS: { field: keyof UserRow & string; label: string }[] = [
  { field: "screen_name", label: "user" },
  { field: "total_tweets", label: "tweets" },
  { field: "retweets_made", label: "rts made" },
  { field: "retweets_received", label: "rts received" },
  { field: "mentions_made", label: "mentions made" },
  { field: "mentions_received", label: "mentions received" },
  { field: "language", label: "lang" },
  { field: "polarity", label: "sentiment" },
  { field: "partisanship_label", label: "partisanship" },
  { field: "partisanship_confidence", label: "confidence" },
  { field: "last_active", label: "last active" },
  { field: "account_created_at", label: "account created" },
];

function cellText(row: UserRow, field: keyof UserRow & string): string {
  const value = row[field];
  if (value === null || value === undefined) return "";
  if (typeof value === "number" && !Number.isInteger(value)) return value.toFixed(3);
  return String(value);
}

/**
 * Filterable, sortable, paginated user table. The view only issues queries
 * and renders the rows the server returns; sorting and filtering always
 * happen server-side.
 */
export class TableView {
  query: TableQueryState;
  private doc: TableDoc | null = null;
  private table: HTMLTableElement;
  private status: HTMLElement;
  private nameFilter: HTMLInputElement;
  private minTweets: HTMLInputElement;
  private exportButton: HTMLButtonElement;
  private prevButton: HTMLButtonElement;
  private nextButton: HTMLButtonElement;

  onQueryChange: (() => void) | null = null;
  onExport: (() => void) | null = null;
  onSelect: ((userId: number) => void) | null = null;

  constructor(private container: HTMLElement, initial: TableQueryState) {
    this.query = initial;

    const controls = document.createElement("div");
    controls.className = "table-controls";
    this.nameFilter = document.createElement("input");
    this.nameFilter.placeholder = "filter screen name";
    this.nameFilter.className = "filter-name";
    this.nameFilter.addEventListener("input", () => this.applyFilters());
    this.minTweets = document.createElement("input");
    this.minTweets.placeholder = "min tweets";
    this.minTweets.className = "filter-min-tweets";
    this.minTweets.addEventListener("input", () => this.applyFilters());
    this.exportButton = document.createElement("button");
    this.exportButton.textContent = "Export CSV";
    this.exportButton.className = "export-csv";
    this.exportButton.addEventListener("click", () => this.onExport?.());
    this.prevButton = document.createElement("button");
    this.prevButton.textContent = "prev";
    this.prevButton.className = "page-prev";
    this.prevButton.addEventListener("click", () => this.page(-1));
    this.nextButton = document.createElement("button");
    this.nextButton.textContent = "next";
    this.nextButton.className = "page-next";
    this.nextButton.addEventListener("click", () => this.page(1));
    this.status = document.createElement("span");
    this.status.className = "table-status";
    controls.append(
      this.nameFilter,
      this.minTweets,
      this.prevButton,
      this.nextButton,
      this.status,
      this.exportButton,
    );

    this.table = document.createElement("table");
    this.table.className = "user-table";
    container.append(controls, this.table);
    this.renderHeader();
  }

  get totalMatching(): number {
    return this.doc?.total_matching ?? 0;
  }

  rowsShown(): UserRow[] {
    return this.doc?.rows ?? [];
  }

  private applyFilters(): void {
    const filters: string[] = [];
    const name = this.nameFilter.value.trim();
    if (name) filters.push(`screen_name:contains:${name}`);
    const min = this.minTweets.value.trim();
    if (min && /^\d+$/.test(min)) filters.push(`total_tweets:gt:${Number(min) - 1}`);
    this.query = { ...this.query, filters, offset: 0 };
    this.onQueryChange?.();
  }

  sortBy(field: string): void {
    const dir =
      this.query.sortField === field && this.query.sortDir === "desc" ? "asc" : "desc";
    this.query = { ...this.query, sortField: field, sortDir: dir, offset: 0 };
    this.renderHeader();
    this.onQueryChange?.();
  }

  private page(direction: number): void {
    const next = this.query.offset + direction * this.query.limit;
    if (next < 0 || next >= this.totalMatching) return;
    this.query = { ...this.query, offset: next };
    this.onQueryChange?.();
  }

  private renderHeader(): void {
    let head = this.table.tHead;
    if (!head) head = this.table.createTHead();
    head.textContent = "";
    const row = head.insertRow();
    for (const column of COLUMNS) {
      const cell = document.createElement("th");
      cell.dataset.field = column.field;
      const marker =
        this.query.sortField === column.field
          ? this.query.sortDir === "desc"
            ? " ↓"
            : " ↑"
          : "";
      cell.textContent = column.label + marker;
      cell.addEventListener("click", () => this.sortBy(column.field));
      row.appendChild(cell);
    }
  }

  render(doc: TableDoc): void {
    this.doc = doc;
    this.renderHeader();
    const old = this.table.tBodies[0];
    if (old) old.remove();
    const body = this.table.createTBody();
    for (const rowData of doc.rows) {
      const row = body.insertRow();
      row.dataset.userId = String(rowData.user_id);
      row.addEventListener("click", () => this.onSelect?.(rowData.user_id));
      for (const column of COLUMNS) {
        row.insertCell().textContent = cellText(rowData, column.field);
      }
    }
    const from = doc.total_matching === 0 ? 0 : doc.offset + 1;
    const to = doc.offset + doc.rows.length;
    this.status.textContent = `${from}-${to} of ${doc.total_matching}`;
  }
}
