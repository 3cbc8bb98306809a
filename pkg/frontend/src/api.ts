/** Typed client for the scoring service. All ranking happens server-side;
 * this client only fetches and never reorders. */

export interface SentenceRecord {
  index: number;
  text: string;
  score: number;
  color_bin: number;
}

export interface AnalyzeResponse {
  session_id: string;
  language: string;
  sentences: SentenceRecord[];
}

export type SortMode = "position" | "score";

export class ApiError extends Error {
  constructor(
    readonly code: string,
    readonly status: number,
    detail?: string,
  ) {
    super(detail ? `${code}: ${detail}` : code);
  }
}

export interface Client {
  sources(): Promise<string[]>;
  analyze(text: string, source: string): Promise<AnalyzeResponse>;
  view(sessionId: string, source: string, sort: SortMode): Promise<AnalyzeResponse>;
}

type Fetcher = (input: string, init?: RequestInit) => Promise<Response>;

export function createClient(baseUrl = "", fetcher?: Fetcher): Client {
  const doFetch: Fetcher = fetcher ?? ((input, init) => fetch(input, init));

  async function request<T>(path: string, init?: RequestInit): Promise<T> {
    let res: Response;
    try {
      res = await doFetch(baseUrl + path, init);
    } catch {
      throw new ApiError("NetworkError", 0, "could not reach the scoring service");
    }
    const body = await res.json().catch(() => null);
    if (!res.ok) {
      const code = body && typeof body.error === "string" ? body.error : `Http${res.status}`;
      const detail = body && typeof body.detail === "string" ? body.detail : undefined;
      throw new ApiError(code, res.status, detail);
    }
    return body as T;
  }

  return {
    sources: () => request<string[]>("/api/sources"),
    analyze: (text, source) =>
      request<AnalyzeResponse>("/api/analyze", {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ text, source }),
      }),
    view: (sessionId, source, sort) =>
      request<AnalyzeResponse>(
        `/api/analyze/${encodeURIComponent(sessionId)}?source=${encodeURIComponent(source)}&sort=${sort}`,
      ),
  };
}
