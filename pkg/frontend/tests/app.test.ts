// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import { PersonaClient } from "../src/api.js";
import { mountApp } from "../src/main.js";
import { FakeService } from "./fake_service.js";

describe("mountApp", () => {
  it("hides the banner while the service answers", async () => {
    const service = new FakeService();
    const root = document.createElement("div");
    const { banner } = mountApp(root, new PersonaClient("", service.fetch));
    await new Promise((r) => setTimeout(r, 0));
    expect(banner.hidden).toBe(true);
  });

  it("shows the banner when the service is down", async () => {
    const service = new FakeService();
    service.down = true;
    const root = document.createElement("div");
    const { banner } = mountApp(root, new PersonaClient("", service.fetch));
    await new Promise((r) => setTimeout(r, 0));
    expect(banner.hidden).toBe(false);
  });

  it("switching to the profile tab fetches the summary", async () => {
    const service = new FakeService();
    const root = document.createElement("div");
    document.body.replaceChildren(root);
    const { dashboard } = mountApp(root, new PersonaClient("", service.fetch));
    await new Promise((r) => setTimeout(r, 0));
    const tabs = root.querySelectorAll("nav button");
    (tabs[1] as HTMLButtonElement).click();
    await new Promise((r) => setTimeout(r, 0));
    expect(dashboard.element.hidden).toBe(false);
    expect(
      service.requestsTo("/api/profile/summary").length,
    ).toBeGreaterThanOrEqual(2);
  });
});
