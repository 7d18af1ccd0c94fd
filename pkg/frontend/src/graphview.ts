/** SVG rendering of a subgraph with the active node highlighted.
 * Proxy nodes render as rectangles, version nodes as circles; change edges
 * are colored by their first category, implements edges stay neutral. */

import { edgeColor, IMPLEMENTS_EDGE_COLOR, NODE_COLORS } from "./colors.js";
import { layoutGraph } from "./layout.js";
import type { Subgraph } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 800;
const HEIGHT = 420;

export class GraphView {
  private readonly container: HTMLElement;
  private readonly doc: Document;
  onSelect: ((nodeId: string) => void) | null = null;

  constructor(container: HTMLElement) {
    this.container = container;
    this.doc = container.ownerDocument;
  }

  render(graph: Subgraph | null, activeNode: string | null): void {
    this.container.textContent = "";
    if (graph === null) return;
    const svg = this.doc.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
    svg.setAttribute("class", "graph-canvas");
    const layout = layoutGraph(graph, WIDTH, HEIGHT);

    for (const edge of graph.edges) {
      const from = layout.get(edge.source);
      const to = layout.get(edge.target);
      if (!from || !to) continue;
      const line = this.doc.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(from.x));
      line.setAttribute("y1", String(from.y));
      line.setAttribute("x2", String(to.x));
      line.setAttribute("y2", String(to.y));
      line.setAttribute("class", `edge edge-${edge.kind}`);
      line.setAttribute(
        "stroke",
        edge.kind === "observed_change" ? edgeColor(edge.categories) : IMPLEMENTS_EDGE_COLOR,
      );
      line.setAttribute("stroke-width", edge.kind === "observed_change" ? "2.5" : "1");
      if (edge.categories?.length) {
        line.setAttribute("data-categories", edge.categories.join(","));
      }
      svg.appendChild(line);
    }

    for (const node of graph.nodes) {
      const point = layout.get(node.id);
      if (!point) continue;
      const group = this.doc.createElementNS(SVG_NS, "g");
      group.setAttribute("class", `node node-${node.type}`);
      group.setAttribute("data-node-id", node.id);
      if (node.id === activeNode) group.classList.add("active");
      let shape;
      if (node.type === "proxy") {
        shape = this.doc.createElementNS(SVG_NS, "rect");
        shape.setAttribute("x", String(point.x - 14));
        shape.setAttribute("y", String(point.y - 10));
        shape.setAttribute("width", "28");
        shape.setAttribute("height", "20");
      } else {
        shape = this.doc.createElementNS(SVG_NS, "circle");
        shape.setAttribute("cx", String(point.x));
        shape.setAttribute("cy", String(point.y));
        shape.setAttribute("r", "11");
      }
      shape.setAttribute("fill", NODE_COLORS[node.type]);
      shape.setAttribute("stroke", node.id === activeNode ? "#000000" : "#ffffff");
      shape.setAttribute("stroke-width", node.id === activeNode ? "3" : "1.5");
      group.appendChild(shape);
      const text = this.doc.createElementNS(SVG_NS, "text");
      text.setAttribute("x", String(point.x));
      text.setAttribute("y", String(point.y + 26));
      text.setAttribute("text-anchor", "middle");
      text.setAttribute("class", "node-label");
      text.textContent = shortLabel(node.label);
      group.appendChild(text);
      group.addEventListener("click", () => this.onSelect?.(node.id));
      svg.appendChild(group);
    }
    this.container.appendChild(svg);
  }
}

function shortLabel(label: string): string {
  return label.replace(/0x[0-9a-f]{40}/g, (addr) => `${addr.slice(0, 8)}…${addr.slice(-4)}`);
}
