/** Typed client for the Trendcast HTTP service. Every string the service
 * sends back is returned verbatim — the client never rewrites agent text. */

export interface CreateSessionResponse {
  session_id: string;
  reply: string;
  seed: number;
  phase: string;
}

export interface MessageResponse {
  reply: string;
  phase: string;
  wishlist: string[];
}

export interface WishlistItem {
  product_id: string;
  name: string;
  price: string;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

/** The surface the chat controller depends on; tests substitute fakes. */
export interface ChatApi {
  createSession(category?: string, seed?: number): Promise<CreateSessionResponse>;
  sendMessage(sessionId: string, text: string): Promise<MessageResponse>;
  userWishlist(): Promise<WishlistItem[]>;
  categories(): Promise<string[]>;
}

export class TrendcastApi implements ChatApi {
  private readonly baseUrl: string;

  constructor(
    baseUrl: string,
    private readonly userId: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = {
      method,
      headers: {
        "Content-Type": "application/json",
        "X-User-Id": this.userId,
      },
    };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = `${response.status} ${response.statusText}`;
      try {
        const payload = (await response.json()) as { detail?: unknown };
        if (typeof payload.detail === "string") {
          detail = payload.detail;
        }
      } catch {
        // Non-JSON error body; keep the status line.
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(category?: string, seed?: number): Promise<CreateSessionResponse> {
    const body: Record<string, unknown> = {};
    if (category !== undefined) body.category = category;
    if (seed !== undefined) body.seed = seed;
    return this.request<CreateSessionResponse>("POST", "/sessions", body);
  }

  sendMessage(sessionId: string, text: string): Promise<MessageResponse> {
    return this.request<MessageResponse>(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/messages`,
      { text },
    );
  }

  async userWishlist(): Promise<WishlistItem[]> {
    const data = await this.request<{ items: WishlistItem[] }>(
      "GET",
      `/users/${encodeURIComponent(this.userId)}/wishlist`,
    );
    return data.items;
  }

  async categories(): Promise<string[]> {
    const data = await this.request<{ categories: string[] }>("GET", "/categories");
    return data.categories;
  }
}
