import { PersonaClient } from "./api.js";
import { Dashboard } from "./dashboard.js";
import { SearchPage } from "./search.js";

/**
 * Wires the two views plus a service-health banner into a root element.
 * Exported so tests can mount the whole app against a fake fetch.
 */
export function mountApp(
  root: HTMLElement,
  client: PersonaClient,
): { search: SearchPage; dashboard: Dashboard; banner: HTMLElement } {
  const doc = root.ownerDocument;

  const banner = doc.createElement("div");
  banner.className = "service-banner";
  banner.hidden = true;
  banner.textContent = "service unreachable — showing last known state";

  const nav = doc.createElement("nav");
  const searchTab = doc.createElement("button");
  searchTab.textContent = "Search";
  const profileTab = doc.createElement("button");
  profileTab.textContent = "Profile";
  nav.append(searchTab, profileTab);

  const search = new SearchPage(doc, client);
  const dashboard = new Dashboard(doc, client);
  dashboard.element.hidden = true;

  searchTab.addEventListener("click", () => {
    search.element.hidden = false;
    dashboard.element.hidden = true;
  });
  profileTab.addEventListener("click", () => {
    dashboard.element.hidden = false;
    search.element.hidden = true;
    void guard(dashboard.refresh());
  });

  root.append(banner, nav, search.element, dashboard.element);

  async function guard(work: Promise<unknown>): Promise<void> {
    try {
      await work;
      banner.hidden = true;
    } catch {
      banner.hidden = false;
    }
  }

  // Initial health probe so a dead service is visible before any interaction.
  void guard(client.summary());

  const form = search.element.querySelector("form");
  form?.addEventListener("submit", () => {
    // Re-probe alongside each search so the banner clears on recovery.
    void guard(client.summary());
  });

  return { search, dashboard, banner };
}

declare global {
  interface Window {
    PERSONA_BASE_URL?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const base = window.PERSONA_BASE_URL ?? "";
  mountApp(document.getElementById("app")!, new PersonaClient(base));
}
