/**
 * Server-sent-events reader over fetch streams.
 *
 * EventSource cannot send the Last-Event-ID header on manual reconnects and
 * does not exist in Node, so the console parses text/event-stream itself.
 * The same transport therefore runs in the browser and in the test harness.
 */

export interface SseEvent {
  id: number | null;
  event: string;
  data: string;
}

/** Incremental text/event-stream parser; feed() yields completed events. */
export class SseParser {
  private buffer = "";
  private id: number | null = null;
  private eventType = "message";
  private dataLines: string[] = [];

  feed(chunk: string): SseEvent[] {
    this.buffer += chunk;
    const events: SseEvent[] = [];
    for (;;) {
      const newline = this.buffer.indexOf("\n");
      if (newline < 0) break;
      const line = this.buffer.slice(0, newline).replace(/\r$/, "");
      this.buffer = this.buffer.slice(newline + 1);
      if (line === "") {
        if (this.dataLines.length > 0 || this.eventType !== "message") {
          events.push({
            id: this.id,
            event: this.eventType,
            data: this.dataLines.join("\n"),
          });
        }
        this.eventType = "message";
        this.dataLines = [];
        continue;
      }
      if (line.startsWith(":")) continue; // comment / keep-alive
      const colon = line.indexOf(":");
      const field = colon < 0 ? line : line.slice(0, colon);
      let value = colon < 0 ? "" : line.slice(colon + 1);
      if (value.startsWith(" ")) value = value.slice(1);
      if (field === "id") this.id = Number.parseInt(value, 10);
      else if (field === "event") this.eventType = value;
      else if (field === "data") this.dataLines.push(value);
    }
    return events;
  }
}

export interface StreamOptions {
  url: string;
  onEvent: (event: SseEvent) => void;
  /** Called when the stream ends cleanly (server sent `event: end`). */
  onEnd?: () => void;
  onConnectionChange?: (connected: boolean) => void;
  /** Reconnect backoff schedule in ms; the last entry repeats. */
  backoffMs?: number[];
  fetchImpl?: typeof fetch;
}

/**
 * Consume an SSE endpoint with automatic reconnect.
 *
 * Resumes from the last seen event id so reconnects never drop or repeat
 * events; returns a handle that stops the subscription.
 */
export function subscribeStream(options: StreamOptions): { close: () => void } {
  const fetchImpl = options.fetchImpl ?? fetch;
  const backoff = options.backoffMs ?? [500, 1000, 2000, 5000];
  let lastEventId: number | null = null;
  let closed = false;
  let attempt = 0;

  const run = async (): Promise<void> => {
    while (!closed) {
      try {
        const headers: Record<string, string> = { accept: "text/event-stream" };
        if (lastEventId !== null) headers["last-event-id"] = String(lastEventId);
        const response = await fetchImpl(options.url, { headers });
        if (!response.ok || response.body === null) {
          throw new Error(`stream request failed: ${response.status}`);
        }
        options.onConnectionChange?.(true);
        attempt = 0;
        const parser = new SseParser();
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        for (;;) {
          const { done, value } = await reader.read();
          if (closed) {
            await reader.cancel().catch(() => undefined);
            return;
          }
          if (done) break;
          for (const event of parser.feed(decoder.decode(value, { stream: true }))) {
            if (event.event === "end") {
              options.onEnd?.();
              return;
            }
            if (event.id !== null) lastEventId = event.id;
            options.onEvent(event);
          }
        }
        throw new Error("stream closed by server");
      } catch (error) {
        if (closed) return;
        options.onConnectionChange?.(false);
        const wait = backoff[Math.min(attempt, backoff.length - 1)]!;
        attempt += 1;
        await new Promise((resolve) => setTimeout(resolve, wait));
      }
    }
  };

  void run();
  return {
    close: () => {
      closed = true;
    },
  };
}
