import { ForceLayout } from "./force.js";
import type { NetworkDoc, NetworkNode } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

// Edge classes keep the familiar palette: retweets blue, mentions orange.
const EDGE_COLORS: Record<string, string> = {
  retweet: "#2b6cb0",
  mention: "#dd6b20",
};

// Partisan node fills from a colorblind-safe palette.
const NODE_COLORS: Record<string, string> = {
  left: "#0072b2",
  right: "#d55e00",
  abstain: "#999999",
  "n/a": "#d4d4d4",
};

/** node_area arrives in screen-area units; radius preserves the ordering */
function radiusFor(node: NetworkNode): number {
  return Math.max(3, Math.sqrt(node.node_area / Math.PI));
}

export class NetworkView {
  private svg: SVGSVGElement;
  private tooltip: HTMLDivElement;
  private layout: ForceLayout;
  private doc: NetworkDoc | null = null;
  private circles = new Map<number, SVGCircleElement>();
  private lines: { el: SVGLineElement; src: number; dst: number }[] = [];
  private animating = false;

  onSelect: ((userId: number) => void) | null = null;

  constructor(
    private container: HTMLElement,
    private width = 640,
    private height = 480,
  ) {
    this.svg = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
    this.svg.classList.add("network-svg");
    this.tooltip = document.createElement("div");
    this.tooltip.className = "tooltip hidden";
    container.appendChild(this.svg);
    container.appendChild(this.tooltip);
    this.layout = new ForceLayout(width, height);
  }

  nodeIds(): number[] {
    return [...this.circles.keys()];
  }

  render(doc: NetworkDoc): void {
    this.doc = doc;
    this.svg.textContent = "";
    this.circles.clear();
    this.lines = [];
    this.tooltip.classList.add("hidden");

    if (doc.nodes.length === 0) {
      const empty = document.createElementNS(SVG_NS, "text");
      empty.setAttribute("x", String(this.width / 2));
      empty.setAttribute("y", String(this.height / 2));
      empty.setAttribute("text-anchor", "middle");
      empty.classList.add("empty-state");
      empty.textContent = "no diffusion activity for this meme";
      this.svg.appendChild(empty);
      return;
    }

    this.layout.load(
      doc.nodes.map((n) => n.user_id),
      doc.nodes.map(radiusFor),
      doc.edges.map((e) => ({ src: e.src, dst: e.dst })),
    );
    this.layout.run(60);

    const edgeGroup = document.createElementNS(SVG_NS, "g");
    for (const edge of doc.edges) {
      const line = document.createElementNS(SVG_NS, "line") as SVGLineElement;
      line.setAttribute("stroke", EDGE_COLORS[edge.edge_class] ?? "#888");
      // width ships from the server; the client only draws it
      line.setAttribute("stroke-width", String(edge.line_width));
      line.setAttribute("stroke-opacity", "0.55");
      line.dataset.edgeClass = edge.edge_class;
      edgeGroup.appendChild(line);
      this.lines.push({ el: line, src: edge.src, dst: edge.dst });
    }
    this.svg.appendChild(edgeGroup);

    const nodeGroup = document.createElementNS(SVG_NS, "g");
    for (const node of doc.nodes) {
      const circle = document.createElementNS(SVG_NS, "circle") as SVGCircleElement;
      circle.setAttribute("r", String(radiusFor(node)));
      circle.setAttribute("fill", NODE_COLORS[node.partisan_color_class] ?? "#ccc");
      circle.setAttribute("stroke", "#333");
      circle.setAttribute("stroke-width", "1");
      circle.dataset.userId = String(node.user_id);
      circle.dataset.screenName = node.screen_name;
      circle.addEventListener("mouseenter", () => this.showTooltip(node));
      circle.addEventListener("mouseleave", () => this.tooltip.classList.add("hidden"));
      circle.addEventListener("click", () => this.onSelect?.(node.user_id));
      nodeGroup.appendChild(circle);
      this.circles.set(node.user_id, circle);
    }
    this.svg.appendChild(nodeGroup);

    this.applyPositions();
    this.animate(120);
  }

  private showTooltip(node: NetworkNode): void {
    const body = this.layout.get(node.user_id);
    this.tooltip.textContent = node.screen_name;
    this.tooltip.classList.remove("hidden");
    if (body) {
      this.tooltip.style.left = `${body.x + 12}px`;
      this.tooltip.style.top = `${body.y - 12}px`;
    }
  }

  private applyPositions(): void {
    for (const [id, circle] of this.circles) {
      const body = this.layout.get(id);
      if (!body) continue;
      circle.setAttribute("cx", String(body.x));
      circle.setAttribute("cy", String(body.y));
    }
    for (const { el, src, dst } of this.lines) {
      const a = this.layout.get(src);
      const b = this.layout.get(dst);
      if (!a || !b) continue;
      el.setAttribute("x1", String(a.x));
      el.setAttribute("y1", String(a.y));
      el.setAttribute("x2", String(b.x));
      el.setAttribute("y2", String(b.y));
    }
  }

  /** Settle the layout; uses animation frames when the host provides them. */
  private animate(steps: number): void {
    if (typeof requestAnimationFrame !== "function") {
      this.layout.run(steps);
      this.applyPositions();
      return;
    }
    if (this.animating) return;
    this.animating = true;
    let remaining = steps;
    const step = () => {
      if (remaining-- <= 0 || !this.doc) {
        this.animating = false;
        return;
      }
      this.layout.run(2);
      this.applyPositions();
      requestAnimationFrame(step);
    };
    requestAnimationFrame(step);
  }
}
