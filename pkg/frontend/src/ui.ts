/** DOM rendering for the chat: message stream, quick-reply chips, composer,
 * and the wish-list panel. Message text is rendered with textContent so the
 * visible string is exactly what the service returned. */

import type { ChatController } from "./state.js";

export interface QuickReply {
  label: string;
  text: string;
}

export const QUICK_REPLIES: readonly QuickReply[] = [
  { label: "Yes", text: "yes" },
  { label: "No", text: "no" },
  { label: "Tell me more", text: "tell me more" },
  { label: "Bookmark that", text: "bookmark that" },
];

export interface ChatView {
  root: HTMLElement;
  /** Resolves when the controller settles after the most recent action. */
  lastAction: Promise<unknown>;
}

export function mountChat(root: HTMLElement, controller: ChatController): ChatView {
  const doc = root.ownerDocument;
  root.classList.add("trendcast-chat");

  const layout = doc.createElement("div");
  layout.className = "layout";

  const conversation = doc.createElement("section");
  conversation.className = "conversation";

  const stream = doc.createElement("ul");
  stream.className = "messages";
  stream.setAttribute("data-testid", "messages");
  conversation.appendChild(stream);

  const chips = doc.createElement("div");
  chips.className = "chips";
  chips.setAttribute("data-testid", "chips");

  const view: ChatView = { root, lastAction: Promise.resolve() };

  for (const reply of QUICK_REPLIES) {
    const chip = doc.createElement("button");
    chip.type = "button";
    chip.className = "chip";
    chip.textContent = reply.label;
    chip.setAttribute("data-send", reply.text);
    chip.addEventListener("click", () => {
      view.lastAction = controller.send(reply.text);
    });
    chips.appendChild(chip);
  }
  conversation.appendChild(chips);

  const composer = doc.createElement("form");
  composer.className = "composer";
  const input = doc.createElement("input");
  input.type = "text";
  input.placeholder = "Say something…";
  input.setAttribute("data-testid", "composer-input");
  const sendButton = doc.createElement("button");
  sendButton.type = "submit";
  sendButton.textContent = "Send";
  composer.appendChild(input);
  composer.appendChild(sendButton);
  composer.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value;
    input.value = "";
    view.lastAction = controller.send(text);
  });
  conversation.appendChild(composer);

  const panel = doc.createElement("aside");
  panel.className = "wishlist";
  panel.setAttribute("data-testid", "wishlist");
  const heading = doc.createElement("h2");
  heading.textContent = "Wish list";
  const wishlist = doc.createElement("ul");
  const empty = doc.createElement("p");
  empty.className = "empty";
  empty.textContent = "Nothing saved yet.";
  panel.appendChild(heading);
  panel.appendChild(wishlist);
  panel.appendChild(empty);

  layout.appendChild(conversation);
  layout.appendChild(panel);
  root.appendChild(layout);

  function render(): void {
    // Message stream: append only what is new, never rewrite history.
    while (stream.childElementCount < controller.messages.length) {
      const message = controller.messages[stream.childElementCount];
      if (message === undefined) break;
      const item = doc.createElement("li");
      item.setAttribute("data-role", message.role);
      item.textContent = message.text;
      stream.appendChild(item);
    }

    wishlist.replaceChildren();
    for (const entry of controller.wishlistItems) {
      const item = doc.createElement("li");
      item.setAttribute("data-product-id", entry.product_id);
      item.textContent = `${entry.name} — ${entry.price}`;
      wishlist.appendChild(item);
    }
    empty.hidden = controller.wishlistItems.length > 0;

    input.disabled = controller.busy;
    sendButton.disabled = controller.busy;
    for (const chip of Array.from(chips.children)) {
      (chip as HTMLButtonElement).disabled = controller.busy;
    }
  }

  controller.subscribe(render);
  render();
  return view;
}
