/**
 * Playground application: a product form that opens a live session, a
 * chat pane where the operator types the buyer side, and a trace panel
 * per agent reply. The server snapshot is the single source of truth;
 * after every post the view reconciles against GET /sessions/{id}.
 */

import { ApiClient, ApiError, formatMinor } from "./api.js";
import type { ProductForm, SessionSnapshot } from "./api.js";
import { renderTrace, traceFromSnapshotDecision } from "./trace.js";

interface AppState {
  sessionId: string | null;
  snapshot: SessionSnapshot | null;
  inFlight: boolean;
  bottomRevealed: boolean;
}

export interface AppHandle {
  state: AppState;
  refresh(): Promise<void>;
}

export function validateProductForm(form: ProductForm): string | null {
  if (!form.title.trim()) return "Title is required.";
  if (!(form.list_price > 0)) return "List price must be positive.";
  if (!(form.bottom_price > 0)) return "Bottom price must be positive.";
  if (form.bottom_price > form.list_price) {
    return "Bottom price cannot exceed the list price.";
  }
  return null;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function createApp(root: HTMLElement, client: ApiClient): AppHandle {
  const state: AppState = {
    sessionId: null,
    snapshot: null,
    inFlight: false,
    bottomRevealed: false,
  };

  root.innerHTML = "";
  const formView = el("div", "form-view");
  const chatView = el("div", "chat-view hidden");
  root.appendChild(formView);
  root.appendChild(chatView);

  // --- product form -------------------------------------------------------

  const form = el("form", "product-form");
  form.id = "product-form";
  const fields: Array<[keyof ProductForm, string, string]> = [
    ["title", "Title", "text"],
    ["description", "Description", "text"],
    ["category", "Category", "text"],
    ["list_price", "List price", "number"],
    ["bottom_price", "Bottom price (kept private)", "number"],
  ];
  for (const [name, label, type] of fields) {
    const wrap = el("label", "field");
    wrap.appendChild(el("span", "field-label", label));
    const input = el("input");
    input.name = name;
    input.type = type;
    if (type === "number") input.step = "0.01";
    wrap.appendChild(input);
    form.appendChild(wrap);
  }
  const formError = el("div", "form-error hidden");
  formError.id = "form-error";
  const startButton = el("button", "primary", "Start bargaining");
  startButton.type = "submit";
  form.appendChild(formError);
  form.appendChild(startButton);
  formView.appendChild(el("h1", "app-title", "Bargaining playground"));
  formView.appendChild(
    el("p", "app-subtitle", "You are the buyer. The agent sells."),
  );
  formView.appendChild(form);

  function readForm(): ProductForm {
    const data = new FormData(form);
    return {
      title: String(data.get("title") ?? ""),
      description: String(data.get("description") ?? ""),
      category: String(data.get("category") ?? "general") || "general",
      list_price: Number(data.get("list_price")),
      bottom_price: Number(data.get("bottom_price")),
    };
  }

  function showFormError(message: string): void {
    formError.textContent = message;
    formError.classList.remove("hidden");
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void (async () => {
      formError.classList.add("hidden");
      const product = readForm();
      const problem = validateProductForm(product);
      if (problem) {
        showFormError(problem); // invalid forms never reach the server
        return;
      }
      try {
        const created = await client.createSession(product);
        state.sessionId = created.session_id;
        await refresh();
        formView.classList.add("hidden");
        chatView.classList.remove("hidden");
      } catch (error) {
        if (error instanceof ApiError) {
          showFormError(error.message);
        } else {
          showFormError("Could not reach the service.");
        }
      }
    })();
  });

  // --- chat view ----------------------------------------------------------

  const productCard = el("div", "product-card");
  const messages = el("div", "messages");
  messages.id = "messages";
  const composer = el("form", "composer");
  composer.id = "composer";
  const input = el("input");
  input.name = "text";
  input.placeholder = "Type your message as the buyer";
  input.autocomplete = "off";
  const sendButton = el("button", "primary", "Send");
  sendButton.type = "submit";
  composer.appendChild(input);
  composer.appendChild(sendButton);
  const toast = el("div", "toast hidden");
  toast.id = "toast";
  chatView.appendChild(productCard);
  chatView.appendChild(messages);
  chatView.appendChild(composer);
  chatView.appendChild(toast);

  function showToast(message: string): void {
    toast.textContent = message;
    toast.classList.remove("hidden");
    setTimeout(() => toast.classList.add("hidden"), 4000);
  }

  function renderProductCard(snapshot: SessionSnapshot): void {
    productCard.innerHTML = "";
    const header = el("div", "product-header");
    header.appendChild(el("span", "product-title", snapshot.product.title));
    const status = el("span", `status-badge status-${snapshot.status}`, snapshot.status);
    status.id = "status-badge";
    header.appendChild(status);
    productCard.appendChild(header);
    const listLine = el(
      "div",
      "product-price",
      `List price: ${formatMinor(snapshot.product.list_price)}`,
    );
    productCard.appendChild(listLine);
    const bottomLine = el("div", "product-bottom");
    const bottomText = state.bottomRevealed
      ? `Bottom price: ${formatMinor(snapshot.product.bottom_price)}`
      : "Bottom price: hidden";
    bottomLine.appendChild(el("span", "bottom-text", bottomText));
    const reveal = el(
      "button",
      "link",
      state.bottomRevealed ? "hide" : "reveal",
    );
    reveal.type = "button";
    reveal.id = "reveal-bottom";
    reveal.addEventListener("click", () => {
      state.bottomRevealed = !state.bottomRevealed;
      if (state.snapshot) renderProductCard(state.snapshot);
    });
    bottomLine.appendChild(reveal);
    productCard.appendChild(bottomLine);
    if (snapshot.deal_price !== null) {
      productCard.appendChild(
        el("div", "deal-line", `Deal closed at ${formatMinor(snapshot.deal_price)}`),
      );
    }
  }

  function renderMessages(snapshot: SessionSnapshot): void {
    messages.innerHTML = "";
    let decisionIndex = 0;
    for (const utterance of snapshot.utterances) {
      const mine = utterance.speaker === "buyer";
      const bubble = el("div", mine ? "bubble buyer" : "bubble agent");
      bubble.dataset.turn = String(utterance.turn);
      bubble.appendChild(el("div", "bubble-text", utterance.text));
      if (!mine && decisionIndex < snapshot.decisions.length) {
        const trace = traceFromSnapshotDecision(snapshot.decisions[decisionIndex]);
        decisionIndex += 1;
        bubble.appendChild(renderTrace(trace));
      }
      messages.appendChild(bubble);
    }
    messages.scrollTop = messages.scrollHeight;
  }

  function setComposerEnabled(enabled: boolean): void {
    input.disabled = !enabled;
    sendButton.disabled = !enabled;
  }

  async function refresh(): Promise<void> {
    if (!state.sessionId) return;
    const snapshot = await client.getSession(state.sessionId);
    state.snapshot = snapshot;
    renderProductCard(snapshot);
    renderMessages(snapshot);
    setComposerEnabled(snapshot.status === "open" && !state.inFlight);
  }

  composer.addEventListener("submit", (event) => {
    event.preventDefault();
    void (async () => {
      const text = input.value.trim();
      if (!text || !state.sessionId || state.inFlight) return;
      state.inFlight = true;
      setComposerEnabled(false);
      const optimistic = el("div", "bubble buyer pending");
      optimistic.appendChild(el("div", "bubble-text", text));
      messages.appendChild(optimistic);
      try {
        await client.sendMessage(state.sessionId, text);
        input.value = "";
      } catch (error) {
        if (error instanceof ApiError && error.status === 409) {
          showToast("Session already ended; refreshing.");
        } else if (error instanceof ApiError) {
          showToast(error.message);
        } else {
          showToast("Could not reach the service.");
        }
      } finally {
        optimistic.remove();
        state.inFlight = false;
        await refresh(); // snapshot is the source of truth either way
      }
    })();
  });

  return { state, refresh };
}
