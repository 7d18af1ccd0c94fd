/** Application shell: wires search, graph, table, detail, and source panes
 * together and keeps the whole view reconstructible from the URL fragment. */

import { ApiClient, ApiError, isValidAddress } from "./api.js";
import { CATEGORY_COLORS } from "./colors.js";
import { GraphView } from "./graphview.js";
import { SourcePanel } from "./source.js";
import {
  decodeViewState,
  defaultViewState,
  encodeViewState,
  type ViewState,
} from "./state.js";
import { TableView } from "./table.js";
import type { Lineage, ProxiesPage, Subgraph } from "./types.js";

interface WindowLike {
  location: { hash: string };
}

export class App {
  readonly state: ViewState = defaultViewState();
  private readonly api: ApiClient;
  private readonly win: WindowLike;
  private readonly doc: Document;
  private readonly root: HTMLElement;

  private graphView!: GraphView;
  private tableView!: TableView;
  private sourcePanel!: SourcePanel;
  private searchInput!: HTMLInputElement;
  private typeSelect!: HTMLSelectElement;
  private minVersionsInput!: HTMLInputElement;
  private resultsList!: HTMLElement;
  private detailPanel!: HTMLElement;
  private banner!: HTMLElement;
  private validationNote!: HTMLElement;

  private currentGraph: Subgraph | null = null;
  private currentLineage: Lineage | null = null;

  constructor(root: HTMLElement, api: ApiClient, win: WindowLike) {
    this.root = root;
    this.doc = root.ownerDocument;
    this.api = api;
    this.win = win;
  }

  /** Build the DOM skeleton and reconstruct the view from the fragment. */
  async init(): Promise<void> {
    this.buildSkeleton();
    Object.assign(this.state, decodeViewState(this.win.location.hash));
    this.searchInput.value = this.state.filter.q;
    this.typeSelect.value = this.state.filter.proxy_type;
    this.minVersionsInput.value =
      this.state.filter.min_versions === null ? "" : String(this.state.filter.min_versions);
    await this.searchAndLoad();
    if (this.state.selected_address) {
      const address = this.state.selected_address;
      const activeNode = this.state.active_node;
      const showSource = this.state.pane_layout.source;
      await this.loadProxy(address);
      if (activeNode) this.selectNode(activeNode);
      if (showSource && activeNode) {
        const address = this.sourceAddressFor(activeNode);
        if (address) await this.viewSource(address);
      }
    }
  }

  /** Run the proxy search for the current filter and render the results. */
  async searchAndLoad(): Promise<void> {
    const query = this.searchInput.value.trim();
    this.validationNote.textContent = "";
    if (query.startsWith("0x") && !isValidAddress(query)) {
      this.validationNote.textContent = "Not a valid address: expected 0x + 40 hex digits.";
      return;
    }
    this.state.filter.q = query;
    this.state.filter.proxy_type = this.typeSelect.value;
    const minv = this.minVersionsInput.value.trim();
    this.state.filter.min_versions = /^\d+$/.test(minv) ? Number(minv) : null;
    this.syncFragment();
    try {
      const page = await this.api.latest("search", () =>
        this.api.searchProxies({
          q: this.state.filter.q.toLowerCase() || undefined,
          type: this.state.filter.proxy_type || undefined,
          min_versions: this.state.filter.min_versions ?? undefined,
        }),
      );
      if (page !== null) this.renderResults(page);
    } catch (error) {
      this.showBanner(describe(error));
    }
  }

  /** Load the subgraph and lineage for one proxy into the panes. */
  async loadProxy(address: string): Promise<void> {
    this.state.selected_address = address;
    this.state.active_node = null;
    this.syncFragment();
    try {
      const loaded = await this.api.latest("proxy", async () => {
        const [graph, lineage] = await Promise.all([
          this.api.graph(address),
          this.api.lineage(address),
        ]);
        return { graph, lineage };
      });
      if (loaded === null) return;
      this.currentGraph = loaded.graph;
      this.currentLineage = loaded.lineage;
      this.renderPanes();
    } catch (error) {
      this.showBanner(describe(error));
    }
  }

  /** Highlight a node in both graph and table and fill the detail panel. */
  selectNode(nodeId: string): void {
    if (!this.currentGraph?.nodes.some((n) => n.id === nodeId)) return;
    this.state.active_node = nodeId;
    this.syncFragment();
    this.renderPanes();
  }

  /** Cycle the active node through the versions in lineage order. */
  cycleVersion(step: 1 | -1): void {
    const versions = this.versionNodeIds();
    if (versions.length === 0) return;
    const index = this.state.active_node ? versions.indexOf(this.state.active_node) : -1;
    const next = (index + step + versions.length) % versions.length;
    this.selectNode(versions[next]);
  }

  /** Fetch verified source through the backend and show the source pane. */
  async viewSource(address: string): Promise<void> {
    this.state.pane_layout.source = true;
    this.syncFragment();
    this.sourcePanel.renderLoading(address);
    try {
      const bundle = await this.api.latest("source", () => this.api.source(address));
      if (bundle !== null) this.sourcePanel.renderBundle(bundle);
    } catch (error) {
      this.sourcePanel.renderError(address, describe(error));
    }
  }

  /** Version-node counts shown in the graph and in the table; the two must
   * always agree (asserted in the integration tests). */
  versionCounts(): { graph: number; table: number } {
    return {
      graph: this.root.querySelectorAll(".node-version").length,
      table: this.root.querySelectorAll(".version-row").length,
    };
  }

  private versionNodeIds(): string[] {
    return (this.currentLineage?.versions ?? []).map(
      (item) => `version:${item.version.proxy}:${item.version.version_number}`,
    );
  }

  private sourceAddressFor(nodeId: string): string | null {
    const node = this.currentGraph?.nodes.find((n) => n.id === nodeId);
    if (!node) return null;
    const attrs = node.attributes ?? {};
    const address = node.type === "version" ? attrs["contract_address"] : attrs["address"];
    return typeof address === "string" ? address : null;
  }

  private renderPanes(): void {
    this.graphView.render(this.currentGraph, this.state.active_node);
    this.tableView.render(this.currentLineage, this.state.active_node);
    this.renderDetail();
  }

  private renderDetail(): void {
    this.detailPanel.textContent = "";
    const node = this.currentGraph?.nodes.find((n) => n.id === this.state.active_node);
    if (!node) return;
    const title = this.doc.createElement("h3");
    title.textContent = node.type === "proxy" ? "Proxy" : "Version";
    this.detailPanel.appendChild(title);
    const list = this.doc.createElement("dl");
    list.className = "detail-attributes";
    for (const [key, value] of Object.entries(node.attributes ?? {})) {
      const dt = this.doc.createElement("dt");
      dt.textContent = key;
      const dd = this.doc.createElement("dd");
      dd.textContent = Array.isArray(value) ? value.join(", ") : String(value ?? "—");
      list.appendChild(dt);
      list.appendChild(dd);
    }
    this.detailPanel.appendChild(list);
    const address = this.sourceAddressFor(node.id);
    if (address) {
      const button = this.doc.createElement("button");
      button.className = "view-source";
      button.textContent = "View source";
      button.addEventListener("click", () => void this.viewSource(address));
      this.detailPanel.appendChild(button);
    }
  }

  private renderResults(page: ProxiesPage): void {
    this.resultsList.textContent = "";
    const summary = this.doc.createElement("p");
    summary.className = "results-summary";
    summary.textContent = `${page.total} proxies (showing ${page.items.length})`;
    this.resultsList.appendChild(summary);
    for (const proxy of page.items) {
      const item = this.doc.createElement("li");
      item.className = "result-item";
      item.dataset.address = proxy.address;
      item.textContent = `${proxy.address} — ${proxy.proxy_type}, ${proxy.total_versions} versions`;
      item.addEventListener("click", () => void this.loadProxy(proxy.address));
      this.resultsList.appendChild(item);
    }
  }

  private showBanner(message: string): void {
    this.banner.textContent = message;
    this.banner.classList.add("visible");
  }

  private syncFragment(): void {
    this.win.location.hash = encodeViewState(this.state);
  }

  private buildSkeleton(): void {
    this.root.textContent = "";
    this.banner = this.el("div", "error-banner");
    const form = this.el("form", "search-form");
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.searchAndLoad();
    });
    this.searchInput = this.doc.createElement("input");
    this.searchInput.className = "search-input";
    this.searchInput.placeholder = "Address or prefix";
    this.typeSelect = this.doc.createElement("select");
    this.typeSelect.className = "type-select";
    for (const type of ["", "Eip1967", "UupsLike", "BeaconLike", "MinimalEip1167", "DelegatecallGeneric"]) {
      const option = this.doc.createElement("option");
      option.value = type;
      option.textContent = type || "any type";
      this.typeSelect.appendChild(option);
    }
    this.minVersionsInput = this.doc.createElement("input");
    this.minVersionsInput.className = "min-versions";
    this.minVersionsInput.placeholder = "min versions";
    const submit = this.doc.createElement("button");
    submit.type = "submit";
    submit.textContent = "Search";
    form.append(this.searchInput, this.typeSelect, this.minVersionsInput, submit);
    this.validationNote = this.el("p", "validation-note");
    this.resultsList = this.el("ul", "results-list");
    const graphContainer = this.el("div", "graph-pane");
    const tableContainer = this.el("div", "table-pane");
    this.detailPanel = this.el("div", "detail-pane");
    const sourceContainer = this.el("div", "source-pane");
    const legend = this.el("div", "legend");
    for (const [category, color] of Object.entries(CATEGORY_COLORS)) {
      const entry = this.el("span", "legend-entry");
      entry.textContent = category;
      entry.style.borderLeft = `8px solid ${color}`;
      legend.appendChild(entry);
    }
    this.root.append(
      this.banner, form, this.validationNote, this.resultsList,
      legend, graphContainer, tableContainer, this.detailPanel, sourceContainer,
    );
    this.graphView = new GraphView(graphContainer);
    this.graphView.onSelect = (id) => this.selectNode(id);
    this.tableView = new TableView(tableContainer);
    this.tableView.onRowSelect = (id) => this.selectNode(id);
    this.sourcePanel = new SourcePanel(sourceContainer);
    this.sourcePanel.onRetry = (address) => void this.viewSource(address);
    this.doc.addEventListener("keydown", (event) => {
      if (event.key === "ArrowRight") this.cycleVersion(1);
      if (event.key === "ArrowLeft") this.cycleVersion(-1);
    });
  }

  private el(tag: string, className: string): HTMLElement {
    const element = this.doc.createElement(tag);
    element.className = className;
    return element;
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.code}: ${error.message}`;
  return error instanceof Error ? error.message : String(error);
}
