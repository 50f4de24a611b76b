// Small force-directed layout: spring edges, pairwise repulsion, and a
// centering pull. Deterministic (seeded golden-angle start positions), no
// external dependencies, cheap enough for the <= a-few-hundred-node
// subgraphs this dashboard shows.

export interface BodyNode {
  id: number;
  x: number;
  y: number;
  vx: number;
  vy: number;
  radius: number;
}

export interface SpringEdge {
  src: number;
  dst: number;
}

const REPULSION = 1800;
const SPRING = 0.02;
const SPRING_LENGTH = 90;
const CENTER_PULL = 0.012;
const DAMPING = 0.85;

export class ForceLayout {
  nodes: BodyNode[] = [];
  private edges: SpringEdge[] = [];
  private byId = new Map<number, BodyNode>();

  constructor(
    private width: number,
    private height: number,
  ) {}

  load(ids: number[], radii: number[], edges: SpringEdge[]): void {
    this.nodes = [];
    this.byId.clear();
    const cx = this.width / 2;
    const cy = this.height / 2;
    ids.forEach((id, i) => {
      // golden-angle spiral: stable, collision-free starting positions
      const angle = i * 2.39996;
      const r = 12 * Math.sqrt(i + 1);
      const node: BodyNode = {
        id,
        x: cx + r * Math.cos(angle),
        y: cy + r * Math.sin(angle),
        vx: 0,
        vy: 0,
        radius: radii[i],
      };
      this.nodes.push(node);
      this.byId.set(id, node);
    });
    this.edges = edges.filter((e) => this.byId.has(e.src) && this.byId.has(e.dst));
  }

  get(id: number): BodyNode | undefined {
    return this.byId.get(id);
  }

  tick(): void {
    const nodes = this.nodes;
    for (let i = 0; i < nodes.length; i++) {
      for (let j = i + 1; j < nodes.length; j++) {
        const a = nodes[i];
        const b = nodes[j];
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        let d2 = dx * dx + dy * dy;
        if (d2 < 1) {
          dx = (i - j) * 0.1 || 0.1;
          dy = 0.1;
          d2 = dx * dx + dy * dy;
        }
        const force = REPULSION / d2;
        const d = Math.sqrt(d2);
        const fx = (dx / d) * force;
        const fy = (dy / d) * force;
        a.vx += fx;
        a.vy += fy;
        b.vx -= fx;
        b.vy -= fy;
      }
    }
    for (const edge of this.edges) {
      const a = this.byId.get(edge.src)!;
      const b = this.byId.get(edge.dst)!;
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const d = Math.max(1, Math.sqrt(dx * dx + dy * dy));
      const stretch = (d - SPRING_LENGTH) * SPRING;
      const fx = (dx / d) * stretch;
      const fy = (dy / d) * stretch;
      a.vx += fx;
      a.vy += fy;
      b.vx -= fx;
      b.vy -= fy;
    }
    const cx = this.width / 2;
    const cy = this.height / 2;
    for (const node of nodes) {
      node.vx += (cx - node.x) * CENTER_PULL;
      node.vy += (cy - node.y) * CENTER_PULL;
      node.vx *= DAMPING;
      node.vy *= DAMPING;
      node.x += node.vx;
      node.y += node.vy;
      node.x = Math.min(this.width - node.radius, Math.max(node.radius, node.x));
      node.y = Math.min(this.height - node.radius, Math.max(node.radius, node.y));
    }
  }

  run(steps: number): void {
    for (let i = 0; i < steps; i++) this.tick();
  }
}
