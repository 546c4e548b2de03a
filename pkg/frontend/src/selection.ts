// Gesture submission with the concurrency rules the UI promises: at
// most one selection request in flight, and responses that arrive out
// of order are dropped by sequence number, so the highlighted face set
// always equals the service's answer to the newest gesture.

import { ApiClient } from "./api";
import { Gesture } from "./types";

export interface SelectionEvents {
  // pending(true) fires when a request leaves, pending(false) once the
  // newest request settles (older ones settle silently).
  onPending: (pending: boolean) => void;
  onResult: (faces: number[], seq: number) => void;
  onError: (err: Error, retry: () => void) => void;
}

export class SelectionController {
  private seq = 0;
  private appliedSeq = 0;
  private inflight: AbortController | null = null;

  constructor(private api: ApiClient, private events: SelectionEvents) {}

  lastAppliedSeq(): number {
    return this.appliedSeq;
  }

  // Returns this request's sequence number (handy for tests).
  submit(modelId: string, gesture: Gesture): number {
    if (this.inflight) this.inflight.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const mySeq = ++this.seq;
    this.events.onPending(true);

    this.api
      .select(modelId, gesture, controller.signal)
      .then((faces) => {
        if (mySeq > this.appliedSeq) {
          this.appliedSeq = mySeq;
          this.events.onResult(faces, mySeq);
        }
      })
      .catch((err: unknown) => {
        // an aborted request was superseded; its failure is not news
        if (controller.signal.aborted) return;
        if (mySeq !== this.seq) return;
        const e = err instanceof Error ? err : new Error(String(err));
        this.events.onError(e, () => this.submit(modelId, gesture));
      })
      .finally(() => {
        if (mySeq === this.seq) {
          this.inflight = null;
          this.events.onPending(false);
        }
      });
    return mySeq;
  }
}
