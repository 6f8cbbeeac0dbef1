/** WebSocket session client: stream dispatch, command acks, reconnection. */
import {
    commandFrame,
    parseServerFrame,
    type Done,
    type Snapshot,
    type StreamError,
    type WireCommand,
} from './protocol.js';

export type ConnectionStatus = 'connecting' | 'live' | 'reconnecting' | 'closed';

/** Minimal socket surface shared by browser WebSocket and the ws package. */
export interface SocketLike {
    onopen: ((event: unknown) => void) | null;
    onmessage: ((event: { data: unknown }) => void) | null;
    onerror: ((event: unknown) => void) | null;
    onclose: ((event: unknown) => void) | null;
    send(data: string): void;
    close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

const defaultSocketFactory: SocketFactory = (url) => {
    const ctor = (globalThis as { WebSocket?: new (url: string) => unknown }).WebSocket;
    if (ctor === undefined) {
        throw new Error('no global WebSocket; inject a socket factory');
    }
    return new ctor(url) as SocketLike;
};

export const RECONNECT_DELAYS_MS = [250, 500, 1000, 2000, 4000] as const;

export interface PendingCommand {
    id: string;
    /** Resolves with the engine step the command was applied at. */
    step: Promise<number>;
}

export interface SessionClientOptions {
    socketFactory?: SocketFactory;
    onSnapshot?: (snapshot: Snapshot) => void;
    onStatus?: (status: ConnectionStatus) => void;
    onDone?: (done: Done) => void;
    /** Server errors not tied to one of our pending commands. */
    onServerError?: (error: StreamError) => void;
    reconnectDelaysMs?: readonly number[];
}

interface Resolver {
    resolve: (step: number) => void;
    reject: (error: Error) => void;
}

/** Omit that distributes over each member of the command union. */
type CommandBody<T> = T extends unknown ? Omit<T, 'id'> & { id?: string } : never;

export class SessionClient {
    readonly streamUrl: string;
    status: ConnectionStatus = 'connecting';
    latestSnapshot: Snapshot | null = null;
    finished = false;
    /** Mirrors the paused flag of the most recent snapshot. */
    paused = false;

    private readonly factory: SocketFactory;
    private readonly options: SessionClientOptions;
    private readonly delays: readonly number[];
    private readonly pending = new Map<string, Resolver>();
    private socket: SocketLike | null = null;
    private attempts = 0;
    private commandCounter = 0;
    private closedByUser = false;
    private reconnectTimer: ReturnType<typeof setTimeout> | null = null;

    constructor(streamUrl: string, options: SessionClientOptions = {}) {
        this.streamUrl = streamUrl.replace(/^http/, 'ws');
        this.factory = options.socketFactory ?? defaultSocketFactory;
        this.delays = options.reconnectDelaysMs ?? RECONNECT_DELAYS_MS;
        this.options = options;
    }

    get pendingCount(): number {
        return this.pending.size;
    }

    connect(): void {
        if (this.closedByUser || this.finished) return;
        this.setStatus(this.attempts === 0 ? 'connecting' : 'reconnecting');
        const socket = this.factory(this.streamUrl);
        this.socket = socket;
        socket.onopen = () => {
            this.attempts = 0;
            this.setStatus('live');
        };
        socket.onmessage = (event) => {
            const raw = typeof event.data === 'string'
                ? event.data : String(event.data);
            this.handleRaw(raw);
        };
        socket.onerror = () => { /* the close event drives recovery */ };
        socket.onclose = () => {
            if (this.socket !== socket) return;
            this.socket = null;
            this.failPending(new Error('connection lost'));
            if (this.closedByUser || this.finished) {
                this.setStatus('closed');
                return;
            }
            const delay = this.delays[Math.min(this.attempts, this.delays.length - 1)];
            this.attempts += 1;
            this.setStatus('reconnecting');
            this.reconnectTimer = setTimeout(() => {
                this.reconnectTimer = null;
                this.connect();
            }, delay);
        };
    }

    close(): void {
        this.closedByUser = true;
        if (this.reconnectTimer !== null) {
            clearTimeout(this.reconnectTimer);
            this.reconnectTimer = null;
        }
        this.failPending(new Error('client closed'));
        if (this.socket !== null) {
            const socket = this.socket;
            this.socket = null;
            socket.close();
        }
        this.setStatus('closed');
    }

    /** Send a command frame; resolves on ack, rejects on a matching error.
     *
     * Returns null without sending when the session is paused, unless the
     * command is a resume: a paused session must receive nothing else.
     */
    send(command: CommandBody<WireCommand>): PendingCommand | null {
        if (this.paused && command.kind !== 'resume') return null;
        if (this.socket === null || this.status !== 'live') {
            throw new Error('not connected');
        }
        this.commandCounter += 1;
        const id = command.id ?? `c${this.commandCounter}`;
        const wire = { ...command, id } as WireCommand;
        const step = new Promise<number>((resolve, reject) => {
            this.pending.set(id, { resolve, reject });
        });
        this.socket.send(commandFrame(wire));
        return { id, step };
    }

    setCenter(x: number, y: number): PendingCommand | null {
        return this.send({ kind: 'set_center', x, y });
    }

    setL(value: number): PendingCommand | null {
        return this.send({ kind: 'set_l', value });
    }

    setTrailWidth(value: number): PendingCommand | null {
        return this.send({ kind: 'set_trail_width', value });
    }

    pause(): PendingCommand | null {
        return this.send({ kind: 'pause' });
    }

    resume(): PendingCommand | null {
        return this.send({ kind: 'resume' });
    }

    private handleRaw(raw: string): void {
        const frame = parseServerFrame(raw);
        switch (frame.type) {
            case 'snapshot': {
                this.latestSnapshot = frame.payload;
                this.paused = frame.payload.paused;
                this.options.onSnapshot?.(frame.payload);
                break;
            }
            case 'ack': {
                const resolver = this.pending.get(frame.payload.command_id);
                if (resolver !== undefined) {
                    this.pending.delete(frame.payload.command_id);
                    resolver.resolve(frame.payload.step);
                }
                break;
            }
            case 'error': {
                const cid = frame.payload.command_id;
                const resolver = cid === null ? undefined : this.pending.get(cid);
                if (cid !== null && resolver !== undefined) {
                    this.pending.delete(cid);
                    resolver.reject(new Error(frame.payload.message));
                } else {
                    this.options.onServerError?.(frame.payload);
                }
                break;
            }
            case 'done': {
                this.finished = true;
                this.options.onDone?.(frame.payload);
                break;
            }
        }
    }

    private failPending(error: Error): void {
        for (const resolver of this.pending.values()) {
            resolver.reject(error);
        }
        this.pending.clear();
    }

    private setStatus(status: ConnectionStatus): void {
        if (this.status === status) return;
        this.status = status;
        this.options.onStatus?.(status);
    }
}
