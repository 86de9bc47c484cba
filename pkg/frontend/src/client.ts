// Websocket wiring with a reconnect loop. Incoming messages land in the
// shared view state; outgoing messages report whether the socket accepted
// them so the input layer can surface drops.

import type { ClientMessage } from "./protocol.js";
import { parseServerMessage } from "./protocol.js";
import type { ViewState } from "./view_state.js";
import { applyMessage } from "./view_state.js";

const RECONNECT_DELAY_MS = 1500;

export class ServiceClient {
  private socket: WebSocket | null = null;
  private closed = false;

  constructor(
    private readonly url: string,
    private readonly state: ViewState,
    private readonly onScene: () => void = () => {},
  ) {}

  connect(): void {
    this.state.connection = "connecting";
    const socket = new WebSocket(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.state.connection = "open";
    };
    socket.onmessage = (event: MessageEvent) => {
      if (typeof event.data !== "string") return;
      const message = parseServerMessage(event.data);
      if (message === null) return;
      applyMessage(this.state, message, performance.now());
      if (message.type === "scene") this.onScene();
    };
    socket.onclose = () => {
      this.state.connection = "closed";
      this.socket = null;
      if (!this.closed) {
        setTimeout(() => this.connect(), RECONNECT_DELAY_MS);
      }
    };
    socket.onerror = () => socket.close();
  }

  get connected(): boolean {
    return this.socket !== null && this.socket.readyState === WebSocket.OPEN;
  }

  send(message: ClientMessage): boolean {
    if (!this.connected || this.socket === null) return false;
    this.socket.send(JSON.stringify(message));
    return true;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
