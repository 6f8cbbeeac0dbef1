/** Shared test doubles for the session stream. */
import type { SocketLike } from '../src/client.js';
import type { SessionConfig, SessionInfo, Snapshot } from '../src/protocol.js';

export class FakeSocket implements SocketLike {
    onopen: ((event: unknown) => void) | null = null;
    onmessage: ((event: { data: unknown }) => void) | null = null;
    onerror: ((event: unknown) => void) | null = null;
    onclose: ((event: unknown) => void) | null = null;
    sent: string[] = [];
    closed = false;

    constructor(readonly url: string) {}

    send(data: string): void {
        this.sent.push(data);
    }

    close(): void {
        this.closed = true;
        this.onclose?.({});
    }

    open(): void {
        this.onopen?.({});
    }

    receive(frame: unknown): void {
        this.onmessage?.({ data: JSON.stringify(frame) });
    }

    drop(): void {
        this.onclose?.({});
    }
}

export function makeSnapshot(partial: Partial<Snapshot> = {}): Snapshot {
    return {
        seq: 1, step: 0, clock: 0.0, paused: false, state: 'running',
        l: 5.0, trail_width: 15.0, cost: 0.0, chords_consumed: 0,
        chord: null, densities: [], robots: [], stamps: [], keyframe: null,
        ...partial,
    };
}

export function makeConfig(partial: Partial<SessionConfig> = {}): SessionConfig {
    return {
        canvas_size: [4.0, 4.0],
        pixels_per_unit: 1.0,
        trail_strength: 0.08,
        trail_width: 2.0,
        max_trail_width: 10.0,
        motion: { l_min: 1.0, l_max: 5.0, t_max: 180.0 },
        ...partial,
    };
}

export function makeSessionInfo(config: SessionConfig): SessionInfo {
    return {
        id: 's1',
        state: 'running',
        duration: 4.0,
        pace: 1.0,
        config,
        painting_url: '/sessions/s1/painting.png',
        stream_url: '/sessions/s1/stream',
    };
}
