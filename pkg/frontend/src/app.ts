/** DOM wiring: renders the controller state and binds keyboard controls.
 *
 * Keys: ArrowLeft/ArrowRight step frames (saving on navigate), c copies
 * the previous frame, g carries forward to a chosen frame, s saves,
 * e exports. Everything is also reachable through focusable controls.
 */
import { LabelServiceClient, TrialInfo } from "./api.js";
import { AnnotationSessionController, SessionView } from "./session.js";

function element<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing #${id}`);
  }
  return node as T;
}

export class AnnotatorApp {
  private controller: AnnotationSessionController | null = null;
  private selects: HTMLSelectElement[] = [];

  constructor(private readonly client: LabelServiceClient) {}

  async start(): Promise<void> {
    const trials = await this.client.listTrials();
    const picker = element<HTMLSelectElement>("trial-picker");
    picker.innerHTML = "";
    for (const trial of trials) {
      const option = document.createElement("option");
      option.value = trial.id;
      option.textContent = `${trial.id} (${trial.frame_count} frames)`;
      picker.appendChild(option);
    }
    element<HTMLButtonElement>("open-session").addEventListener("click", () => {
      const trial = trials.find((t) => t.id === picker.value);
      const annotator = element<HTMLInputElement>("annotator").value.trim();
      if (trial && annotator && !annotator.includes("__")) {
        void this.openSession(trial, annotator);
      }
    });
    document.addEventListener("keydown", (event) => this.onKey(event));
  }

  private async openSession(trial: TrialInfo, annotator: string): Promise<void> {
    const controller = new AnnotationSessionController(
      this.client,
      trial,
      annotator,
    );
    this.controller = controller;
    this.buildVariableSelectors(trial, controller);
    controller.onUpdate = (view) => this.render(view);
    await controller.load();
    element<HTMLElement>("session-panel").hidden = false;
    element<HTMLElement>("session-title").textContent = controller.sessionId;
    this.bindButtons(controller);
  }

  private buildVariableSelectors(
    trial: TrialInfo,
    controller: AnnotationSessionController,
  ): void {
    const form = element<HTMLElement>("variables");
    form.innerHTML = "";
    this.selects = [];
    trial.variables.forEach((name, slot) => {
      const label = document.createElement("label");
      label.textContent = name.replace("_", " ");
      const select = document.createElement("select");
      const options = slot === 4 ? trial.progress : trial.vocabulary;
      for (const option of options) {
        const node = document.createElement("option");
        node.value = String(option.code);
        node.textContent = `${option.code} ${option.name}`;
        select.appendChild(node);
      }
      select.addEventListener("change", () => {
        controller.setVariable(slot, Number(select.value));
      });
      label.appendChild(select);
      form.appendChild(label);
      this.selects.push(select);
    });
  }

  private bindButtons(controller: AnnotationSessionController): void {
    element<HTMLButtonElement>("prev").onclick = () => void controller.prev();
    element<HTMLButtonElement>("next").onclick = () => void controller.next();
    element<HTMLButtonElement>("save").onclick = () => void controller.save();
    element<HTMLButtonElement>("copy-prev").onclick = () =>
      void controller.copyPrevious();
    element<HTMLButtonElement>("carry").onclick = () => this.carry();
    element<HTMLButtonElement>("export").onclick = () => void this.export();
    element<HTMLButtonElement>("reload").onclick = () =>
      void controller.reloadFromServer();
  }

  private onKey(event: KeyboardEvent): void {
    if (this.controller === null || event.target instanceof HTMLInputElement) {
      return;
    }
    const controller = this.controller;
    const actions: Record<string, () => void> = {
      ArrowRight: () => void controller.next(),
      ArrowLeft: () => void controller.prev(),
      c: () => void controller.copyPrevious(),
      s: () => void controller.save(),
      g: () => this.carry(),
      e: () => void this.export(),
    };
    const action = actions[event.key];
    if (action && !(event.target instanceof HTMLSelectElement)) {
      event.preventDefault();
      action();
    }
  }

  private carry(): void {
    if (this.controller === null) {
      return;
    }
    const target = Number(element<HTMLInputElement>("carry-target").value);
    if (Number.isInteger(target)) {
      void this.controller.carryTo(target);
    }
  }

  private async export(): Promise<void> {
    if (this.controller === null) {
      return;
    }
    const text = await this.controller.exportTranscript();
    const blob = new Blob([text], { type: "text/plain" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = `${this.controller.sessionId}.txt`;
    link.click();
    URL.revokeObjectURL(link.href);
  }

  private render(view: SessionView): void {
    const controller = this.controller;
    if (controller === null) {
      return;
    }
    element<HTMLImageElement>("frame-image").src = this.client.frameUrl(
      controller.trial.id,
      view.frame,
    );
    element<HTMLElement>("frame-info").textContent =
      `frame ${view.frame + 1} / ${view.frameCount}` +
      (view.dirty ? " (unsaved)" : "");
    element<HTMLElement>("state-preview").textContent = view.selections.join("");
    view.selections.forEach((code, slot) => {
      this.selects[slot].value = String(code);
    });
    const fill = element<HTMLElement>("progress-fill");
    fill.style.width = `${(100 * view.labeledCount) / view.frameCount}%`;
    element<HTMLElement>("progress-text").textContent =
      `${view.labeledCount} / ${view.frameCount} labeled`;
    const banner = element<HTMLElement>("banner");
    banner.hidden = view.banner === null;
    banner.dataset.kind = view.banner ?? "";
    element<HTMLElement>("banner-text").textContent = view.bannerMessage;
    element<HTMLButtonElement>("reload").hidden = view.banner !== "conflict";
  }
}
