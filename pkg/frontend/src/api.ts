// Typed client for the session service. All shapes mirror the JSON contract;
// the client adds one behaviour of its own: per-session stale-response
// dropping via the event-log sequence numbers the service echoes.

export interface PriorParams {
  alpha: number;
  beta: number;
}

export interface Grid {
  theta: number[];
  density: number[];
}

export interface BagInfo {
  bag_id: string;
  counts: Record<string, number>;
  blue: number;
  total: number;
  lot_code: string | null;
}

export interface SessionState {
  id: string;
  created_at: string;
  prior: PriorParams | null;
  prior_locked: boolean;
  revealed: boolean;
  sequence: number;
  bags: BagInfo[];
}

export interface PosteriorResponse {
  scope: string;
  prior: PriorParams;
  posterior: PriorParams;
  data: { blue: number; total: number };
  summary: {
    mean: number;
    mode: number | null;
    variance: number;
    interval: [number, number];
    level: number;
  };
  grid: Grid;
  sequence: number;
}

export interface RevealResponse {
  factories: { name: string; probability: number }[];
  log_bayes_factor: number;
  pooled: { blue: number; total: number };
  lot_codes: {
    bag_id: string;
    lot_code: string | null;
    factory: string | null;
    reason: string | null;
  }[];
  sequence: number;
}

export interface BagSubmission {
  bag_id: string;
  counts?: Record<string, number>;
  blue?: number;
  total?: number;
  lot_code?: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly rule: string | null,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let code = "error";
  let rule: string | null = null;
  let message = `${res.status} ${res.statusText}`;
  try {
    const body = await res.json();
    if (body && typeof body === "object") {
      code = body.code ?? code;
      rule = body.rule ?? null;
      message = body.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(res.status, code, rule, message);
}

export class ApiClient {
  private lastSeen = new Map<string, number>();

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!res.ok) {
      throw await parseError(res);
    }
    return (await res.json()) as T;
  }

  /** Returns false when a response is older than one already seen. */
  private fresh(sessionId: string, sequence: number): boolean {
    const seen = this.lastSeen.get(sessionId) ?? -1;
    if (sequence < seen) {
      return false;
    }
    this.lastSeen.set(sessionId, sequence);
    return true;
  }

  async createSession(): Promise<SessionState> {
    return this.request<SessionState>("/sessions", { method: "POST" });
  }

  async getSession(id: string): Promise<SessionState | null> {
    const state = await this.request<SessionState>(`/sessions/${id}`);
    return this.fresh(id, state.sequence) ? state : null;
  }

  async setPrior(id: string, prior: PriorParams): Promise<SessionState> {
    return this.request<SessionState>(`/sessions/${id}/prior`, {
      method: "PUT",
      body: JSON.stringify(prior),
    });
  }

  async lockPrior(id: string): Promise<SessionState> {
    return this.request<SessionState>(`/sessions/${id}/prior/lock`, {
      method: "POST",
    });
  }

  async addBag(id: string, bag: BagSubmission): Promise<SessionState> {
    return this.request<SessionState>(`/sessions/${id}/bags`, {
      method: "POST",
      body: JSON.stringify(bag),
    });
  }

  /** Pooled (scope "class") or per-bag posterior; null when stale. */
  async getPosterior(
    id: string,
    scope = "class",
    grid = 257,
  ): Promise<PosteriorResponse | null> {
    const params = new URLSearchParams({ scope, grid: String(grid) });
    const body = await this.request<PosteriorResponse>(
      `/sessions/${id}/posterior?${params}`,
    );
    return this.fresh(id, body.sequence) ? body : null;
  }

  async preview(alpha: number, beta: number, grid = 257): Promise<Grid> {
    const params = new URLSearchParams({
      alpha: String(alpha),
      beta: String(beta),
      grid: String(grid),
    });
    const body = await this.request<{ grid: Grid }>(`/preview?${params}`);
    return body.grid;
  }

  async reveal(id: string): Promise<RevealResponse> {
    return this.request<RevealResponse>(`/sessions/${id}/reveal`, {
      method: "POST",
    });
  }
}
