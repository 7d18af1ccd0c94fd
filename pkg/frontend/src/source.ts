/** Source panel: verified source text with an origin badge (live / cache /
 * fixture), an explicit unverified state, and a retry affordance when the
 * upstream explorer is unavailable. */

import type { SourceBundle } from "./types.js";

export class SourcePanel {
  private readonly container: HTMLElement;
  private readonly doc: Document;
  onRetry: ((address: string) => void) | null = null;

  constructor(container: HTMLElement) {
    this.container = container;
    this.doc = container.ownerDocument;
  }

  clear(): void {
    this.container.textContent = "";
  }

  renderLoading(address: string): void {
    this.clear();
    const note = this.doc.createElement("p");
    note.className = "source-loading";
    note.textContent = `Fetching source for ${address}…`;
    this.container.appendChild(note);
  }

  renderBundle(bundle: SourceBundle): void {
    this.clear();
    const header = this.doc.createElement("div");
    header.className = "source-header";
    const title = this.doc.createElement("span");
    title.className = "source-title";
    title.textContent = bundle.verified
      ? `${bundle.contract_name} (${bundle.compiler_version})`
      : bundle.address;
    header.appendChild(title);
    const badge = this.doc.createElement("span");
    badge.className = `origin-badge origin-${bundle.origin}`;
    badge.textContent = bundle.origin;
    header.appendChild(badge);
    this.container.appendChild(header);

    if (!bundle.verified) {
      const note = this.doc.createElement("p");
      note.className = "source-unverified";
      note.textContent = "No verified source available for this contract.";
      this.container.appendChild(note);
      return;
    }
    const pre = this.doc.createElement("pre");
    pre.className = "source-text";
    pre.textContent = bundle.source_text;
    this.container.appendChild(pre);
  }

  renderError(address: string, message: string): void {
    this.clear();
    const banner = this.doc.createElement("div");
    banner.className = "source-error";
    const note = this.doc.createElement("span");
    note.textContent = `Source fetch failed: ${message}`;
    banner.appendChild(note);
    const retry = this.doc.createElement("button");
    retry.className = "source-retry";
    retry.textContent = "Retry";
    retry.addEventListener("click", () => this.onRetry?.(address));
    banner.appendChild(retry);
    this.container.appendChild(banner);
  }
}
