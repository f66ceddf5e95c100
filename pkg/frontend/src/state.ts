/** Chat view-model: an append-only message stream, a server-mirrored wish
 * list, and a single-in-flight guard. All conversational content comes from
 * the service; this layer only records what was said. */

import { ApiError, type ChatApi, type WishlistItem } from "./api.js";

export type Role = "user" | "agent" | "system";

export interface ChatMessage {
  role: Role;
  text: string;
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return `Trendcast answered ${err.status}: ${err.message}`;
  }
  if (err instanceof Error) {
    return `Could not reach Trendcast: ${err.message}`;
  }
  return "Could not reach Trendcast.";
}

export class ChatController {
  /** Append-only: entries are never edited or removed once pushed. */
  readonly messages: ChatMessage[] = [];
  /** Product ids bookmarked in this session, exactly as the server reports. */
  wishlistIds: readonly string[] = [];
  /** Persisted wish-list rows (names and prices) for the side panel. */
  wishlistItems: readonly WishlistItem[] = [];
  phase = "idle";
  sessionId: string | null = null;

  private inFlight = false;
  private readonly listeners = new Set<() => void>();

  constructor(private readonly api: ChatApi) {}

  get busy(): boolean {
    return this.inFlight;
  }

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  /** Open a session. Returns false (with a system message) on failure or
   * when a session is already open. */
  async start(category?: string, seed?: number): Promise<boolean> {
    if (this.inFlight || this.sessionId !== null) return false;
    this.inFlight = true;
    this.notify();
    try {
      const opened = await this.api.createSession(category, seed);
      this.sessionId = opened.session_id;
      this.phase = opened.phase;
      this.messages.push({ role: "agent", text: opened.reply });
      return true;
    } catch (err) {
      this.messages.push({ role: "system", text: describeError(err) });
      return false;
    } finally {
      this.inFlight = false;
      this.notify();
    }
  }

  /** Send one utterance. Rejected (returns false, no mutation) while a
   * request is in flight, before start(), or for blank text. */
  async send(text: string): Promise<boolean> {
    const trimmed = text.trim();
    if (trimmed === "" || this.inFlight || this.sessionId === null) return false;
    this.inFlight = true;
    this.messages.push({ role: "user", text: trimmed });
    this.notify();
    try {
      const answer = await this.api.sendMessage(this.sessionId, trimmed);
      this.phase = answer.phase;
      this.messages.push({ role: "agent", text: answer.reply });
      const grew = answer.wishlist.length !== this.wishlistIds.length;
      this.wishlistIds = answer.wishlist;
      if (grew) {
        await this.refreshWishlist();
      }
      return true;
    } catch (err) {
      this.messages.push({ role: "system", text: describeError(err) });
      return false;
    } finally {
      this.inFlight = false;
      this.notify();
    }
  }

  /** Re-read the persisted wish list; failures become a system message but
   * never break the conversation. */
  async refreshWishlist(): Promise<void> {
    try {
      this.wishlistItems = await this.api.userWishlist();
    } catch (err) {
      this.messages.push({ role: "system", text: describeError(err) });
    }
    this.notify();
  }
}
