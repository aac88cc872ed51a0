/**
 * Typed client for the bargaining session service (/api/v1).
 * The playground is a pure client of this API: no state lives anywhere
 * except the server snapshot plus in-flight optimistic bubbles.
 */

export interface ProductForm {
  title: string;
  description: string;
  category: string;
  list_price: number;
  bottom_price: number;
}

export interface DecisionTrace {
  action: string;
  skill: string | null;
  seller_price: string | null;
  buyer_price_seen: string | null;
  anticipated_buyer_moves: string[];
  rationale: string[];
}

export interface MessageResponse {
  reply: string | null;
  decision_trace: DecisionTrace | null;
  status: "open" | "deal" | "expired";
  deal_price: string | null;
}

export interface SnapshotUtterance {
  speaker: "buyer" | "seller_agent";
  text: string;
  turn: number;
  ts: number;
}

export interface SnapshotDecision {
  action: string;
  skill: string | null;
  seller_price: number | null;
  buyer_price_seen: number | null;
  rationale: string[];
  anticipated_buyer_moves: string[];
}

export interface SessionSnapshot {
  id: string;
  product: {
    id: string;
    title: string;
    description: string;
    category: string;
    list_price: number;
    bottom_price: number;
  };
  utterances: SnapshotUtterance[];
  decisions: SnapshotDecision[];
  status: "open" | "deal" | "expired";
  deal_price: number | null;
  rng_seed: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail: unknown = null,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  try {
    const body = await response.json();
    return new ApiError(
      response.status,
      body.code ?? "error",
      body.message ?? response.statusText,
      body.detail,
    );
  } catch {
    return new ApiError(response.status, "error", response.statusText);
  }
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  createSession(product: ProductForm, rngSeed?: number): Promise<{ session_id: string }> {
    const payload: Record<string, unknown> = { product };
    if (rngSeed !== undefined) payload.rng_seed = rngSeed;
    return this.request("/api/v1/sessions", {
      method: "POST",
      body: JSON.stringify(payload),
    });
  }

  sendMessage(sessionId: string, text: string): Promise<MessageResponse> {
    return this.request(`/api/v1/sessions/${sessionId}/messages`, {
      method: "POST",
      body: JSON.stringify({ text }),
    });
  }

  getSession(sessionId: string): Promise<SessionSnapshot> {
    return this.request(`/api/v1/sessions/${sessionId}`);
  }

  health(): Promise<{ status: string }> {
    return this.request("/api/v1/health");
  }
}

/** Render integer minor units ("21550") the way the service formats prices. */
export function formatMinor(minor: number): string {
  const units = Math.trunc(minor / 100);
  const cents = Math.abs(minor % 100);
  return cents === 0 ? `${units}` : `${units}.${String(cents).padStart(2, "0")}`;
}
