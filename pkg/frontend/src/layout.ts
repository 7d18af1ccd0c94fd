/** Subgraph layout: force-directed in general, with a left-to-right linear
 * fallback when the version nodes form a pure chain (the common case for
 * upgrade histories, where a path reads better than a hairball). */

import type { GraphEdge, GraphNode, Subgraph } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

export type Layout = Map<string, Point>;

function changeEdges(edges: GraphEdge[]): GraphEdge[] {
  return edges.filter((e) => e.kind === "observed_change");
}

/** A subgraph is a pure chain when it has at most one proxy node and its
 * observed_change edges form a single path over the version nodes. */
export function isPureChain(graph: Subgraph): boolean {
  const proxies = graph.nodes.filter((n) => n.type === "proxy");
  if (proxies.length > 1) return false;
  const versions = graph.nodes.filter((n) => n.type === "version");
  const outgoing = new Map<string, number>();
  const incoming = new Map<string, number>();
  for (const edge of changeEdges(graph.edges)) {
    outgoing.set(edge.source, (outgoing.get(edge.source) ?? 0) + 1);
    incoming.set(edge.target, (incoming.get(edge.target) ?? 0) + 1);
  }
  return versions.every(
    (node) => (outgoing.get(node.id) ?? 0) <= 1 && (incoming.get(node.id) ?? 0) <= 1,
  );
}

function versionOrder(node: GraphNode): number {
  const num = node.attributes?.["version_number"];
  return typeof num === "number" ? num : 0;
}

/** Proxy centered on top, versions evenly spaced left to right below it. */
export function linearLayout(graph: Subgraph, width: number, height: number): Layout {
  const layout: Layout = new Map();
  const versions = graph.nodes
    .filter((n) => n.type === "version")
    .sort((a, b) => versionOrder(a) - versionOrder(b));
  const step = width / (versions.length + 1);
  versions.forEach((node, i) => {
    layout.set(node.id, { x: step * (i + 1), y: height * 0.7 });
  });
  for (const node of graph.nodes) {
    if (node.type === "proxy") layout.set(node.id, { x: width / 2, y: height * 0.25 });
  }
  return layout;
}

/** Deterministic LCG so force layouts are reproducible across renders. */
function makeRng(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state * 1664525 + 1013904223) >>> 0;
    return state / 0x100000000;
  };
}

export function forceLayout(
  graph: Subgraph,
  width: number,
  height: number,
  iterations = 150,
): Layout {
  const layout: Layout = new Map();
  const rng = makeRng(graph.nodes.length * 2654435761 + 1);
  const ids = graph.nodes.map((n) => n.id);
  for (const id of ids) {
    layout.set(id, { x: rng() * width, y: rng() * height });
  }
  const area = width * height;
  const k = Math.sqrt(area / Math.max(ids.length, 1));
  let temperature = width / 8;
  for (let iter = 0; iter < iterations; iter++) {
    const disp = new Map<string, Point>(ids.map((id) => [id, { x: 0, y: 0 }]));
    for (let i = 0; i < ids.length; i++) {
      for (let j = i + 1; j < ids.length; j++) {
        const a = layout.get(ids[i])!;
        const b = layout.get(ids[j])!;
        const dx = a.x - b.x;
        const dy = a.y - b.y;
        const dist = Math.max(Math.hypot(dx, dy), 0.01);
        const force = (k * k) / dist;
        const da = disp.get(ids[i])!;
        const db = disp.get(ids[j])!;
        da.x += (dx / dist) * force;
        da.y += (dy / dist) * force;
        db.x -= (dx / dist) * force;
        db.y -= (dy / dist) * force;
      }
    }
    for (const edge of graph.edges) {
      const a = layout.get(edge.source);
      const b = layout.get(edge.target);
      if (!a || !b) continue;
      const dx = a.x - b.x;
      const dy = a.y - b.y;
      const dist = Math.max(Math.hypot(dx, dy), 0.01);
      const force = (dist * dist) / k;
      const da = disp.get(edge.source)!;
      const db = disp.get(edge.target)!;
      da.x -= (dx / dist) * force;
      da.y -= (dy / dist) * force;
      db.x += (dx / dist) * force;
      db.y += (dy / dist) * force;
    }
    for (const id of ids) {
      const d = disp.get(id)!;
      const len = Math.max(Math.hypot(d.x, d.y), 0.01);
      const p = layout.get(id)!;
      p.x += (d.x / len) * Math.min(len, temperature);
      p.y += (d.y / len) * Math.min(len, temperature);
      p.x = Math.min(width - 20, Math.max(20, p.x));
      p.y = Math.min(height - 20, Math.max(20, p.y));
    }
    temperature *= 0.95;
  }
  return layout;
}

export function layoutGraph(graph: Subgraph, width: number, height: number): Layout {
  return isPureChain(graph)
    ? linearLayout(graph, width, height)
    : forceLayout(graph, width, height);
}
