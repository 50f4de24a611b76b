import type { TimeseriesDoc } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

// Bucket-width ladder for zooming; pick the coarsest width that still
// yields a reasonable number of bars.
export const WIDTH_LADDER = [1, 5, 15, 60, 300, 900, 3600, 21600, 86400];
export const TARGET_BARS = 120;

export function pickWidth(spanSeconds: number): number {
  for (const width of WIDTH_LADDER) {
    if (spanSeconds / width <= TARGET_BARS) return width;
  }
  return WIDTH_LADDER[WIDTH_LADDER.length - 1];
}

/**
 * Zoomable activity chart. Bar heights are proportional to the server's
 * bucket counts; dragging across bars narrows the window and refetches at
 * a finer bucket width.
 */
export class TimeseriesView {
  private svg: SVGSVGElement;
  private resetButton: HTMLButtonElement;
  private doc: TimeseriesDoc | null = null;
  private dragStart: number | null = null;

  onZoom: ((t0: number, t1: number, w: number) => void) | null = null;
  onReset: (() => void) | null = null;

  constructor(
    private container: HTMLElement,
    private width = 640,
    private height = 120,
  ) {
    this.svg = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
    this.svg.classList.add("timeseries-svg");
    this.resetButton = document.createElement("button");
    this.resetButton.textContent = "zoom out";
    this.resetButton.className = "zoom-out hidden";
    this.resetButton.addEventListener("click", () => {
      this.resetButton.classList.add("hidden");
      this.onReset?.();
    });
    container.appendChild(this.svg);
    container.appendChild(this.resetButton);
    this.bindDrag();
  }

  barHeights(): number[] {
    return [...this.svg.querySelectorAll("rect")].map((r) =>
      Number(r.getAttribute("height")),
    );
  }

  render(doc: TimeseriesDoc, zoomed = false): void {
    this.doc = doc;
    this.svg.textContent = "";
    this.resetButton.classList.toggle("hidden", !zoomed);
    const counts = doc.counts;
    const peak = Math.max(...counts, 1);
    if (counts.length === 0 || peak === 0) {
      const empty = document.createElementNS(SVG_NS, "text");
      empty.setAttribute("x", String(this.width / 2));
      empty.setAttribute("y", String(this.height / 2));
      empty.setAttribute("text-anchor", "middle");
      empty.classList.add("empty-state");
      empty.textContent = "no activity in this window";
      this.svg.appendChild(empty);
      return;
    }
    const barWidth = this.width / counts.length;
    counts.forEach((count, i) => {
      const bar = document.createElementNS(SVG_NS, "rect");
      const h = (count / peak) * (this.height - 4);
      bar.setAttribute("x", String(i * barWidth));
      bar.setAttribute("y", String(this.height - h));
      bar.setAttribute("width", String(Math.max(barWidth - 1, 0.5)));
      bar.setAttribute("height", String(h));
      bar.dataset.bucket = String(i);
      bar.dataset.count = String(count);
      this.svg.appendChild(bar);
    });
  }

  /** Narrow the window to buckets [i0, i1] and refetch one ladder step finer. */
  zoomToBuckets(i0: number, i1: number): void {
    if (!this.doc || i1 < i0) return;
    const { origin, bucket_width: w, t1: hardEnd } = this.doc;
    const t0 = origin + i0 * w;
    const t1 = Math.min(origin + (i1 + 1) * w, hardEnd);
    if (t1 <= t0) return;
    this.resetButton.classList.remove("hidden");
    this.onZoom?.(t0, t1, pickWidth(t1 - t0));
  }

  private bucketAt(clientX: number): number {
    if (!this.doc || this.doc.counts.length === 0) return 0;
    const rect = this.svg.getBoundingClientRect();
    const scale = rect.width > 0 ? this.width / rect.width : 1;
    const x = (clientX - rect.left) * scale;
    const index = Math.floor(x / (this.width / this.doc.counts.length));
    return Math.min(this.doc.counts.length - 1, Math.max(0, index));
  }

  private bindDrag(): void {
    this.svg.addEventListener("mousedown", (event) => {
      this.dragStart = this.bucketAt(event.clientX);
    });
    this.svg.addEventListener("mouseup", (event) => {
      if (this.dragStart === null) return;
      const end = this.bucketAt(event.clientX);
      const from = Math.min(this.dragStart, end);
      const to = Math.max(this.dragStart, end);
      this.dragStart = null;
      if (to > from) this.zoomToBuckets(from, to);
    });
  }
}
