import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';
import { SessionClient, type ConnectionStatus } from '../src/client.js';
import type { Snapshot } from '../src/protocol.js';
import { FakeSocket, makeSnapshot } from './fakes.js';

interface Harness {
    client: SessionClient;
    sockets: FakeSocket[];
    statuses: ConnectionStatus[];
    snapshots: Snapshot[];
    doneClocks: number[];
    serverErrors: string[];
}

afterEach(() => {
    vi.useRealTimers();
});

function makeClient(url = 'http://host:9/sessions/s1/stream'): Harness {
    const sockets: FakeSocket[] = [];
    const statuses: ConnectionStatus[] = [];
    const snapshots: Snapshot[] = [];
    const doneClocks: number[] = [];
    const serverErrors: string[] = [];
    const client = new SessionClient(url, {
        socketFactory: (wsUrl) => {
            const socket = new FakeSocket(wsUrl);
            sockets.push(socket);
            return socket;
        },
        onStatus: (status) => statuses.push(status),
        onSnapshot: (snapshot) => snapshots.push(snapshot),
        onDone: (done) => doneClocks.push(done.clock),
        onServerError: (error) => serverErrors.push(error.message),
    });
    return { client, sockets, statuses, snapshots, doneClocks, serverErrors };
}

describe('connection lifecycle', () => {
    it('rewrites http to ws in the stream url', () => {
        const { client, sockets } = makeClient('http://host:9/sessions/s1/stream');
        client.connect();
        expect(client.streamUrl).toBe('ws://host:9/sessions/s1/stream');
        expect(sockets[0].url).toBe('ws://host:9/sessions/s1/stream');
    });

    it('moves connecting -> live on open', () => {
        const { client, sockets, statuses } = makeClient();
        client.connect();
        expect(client.status).toBe('connecting');
        sockets[0].open();
        expect(client.status).toBe('live');
        expect(statuses).toEqual(['live']);
    });

    it('close() shuts the socket and never reconnects', () => {
        vi.useFakeTimers();
        const { client, sockets } = makeClient();
        client.connect();
        sockets[0].open();
        client.close();
        expect(sockets[0].closed).toBe(true);
        expect(client.status).toBe('closed');
        vi.advanceTimersByTime(60_000);
        expect(sockets.length).toBe(1);
    });

    it('a done frame marks the stream finished and stops reconnects', () => {
        vi.useFakeTimers();
        const { client, sockets, doneClocks } = makeClient();
        client.connect();
        sockets[0].open();
        sockets[0].receive({ type: 'done', payload: {
            step: 40, clock: 2.0, painting_url: '/sessions/s1/painting.png' } });
        expect(client.finished).toBe(true);
        expect(doneClocks).toEqual([2.0]);
        sockets[0].drop();
        expect(client.status).toBe('closed');
        vi.advanceTimersByTime(60_000);
        expect(sockets.length).toBe(1);
    });
});

describe('reconnection backoff', () => {
    beforeEach(() => vi.useFakeTimers());
    afterEach(() => vi.useRealTimers());

    it('retries on the 250/500/1000/2000/4000 ms schedule, capped', () => {
        const { client, sockets } = makeClient();
        client.connect();
        sockets[0].open();

        const expected = [250, 500, 1000, 2000, 4000, 4000, 4000];
        for (const delay of expected) {
            const before = sockets.length;
            sockets[sockets.length - 1].drop();
            expect(client.status).toBe('reconnecting');
            vi.advanceTimersByTime(delay - 1);
            expect(sockets.length).toBe(before);
            vi.advanceTimersByTime(1);
            expect(sockets.length).toBe(before + 1);
        }
    });

    it('a successful open resets the backoff', () => {
        const { client, sockets } = makeClient();
        client.connect();
        sockets[0].open();
        sockets[0].drop();
        vi.advanceTimersByTime(250);
        sockets[1].drop();
        vi.advanceTimersByTime(500);
        sockets[2].open();
        expect(client.status).toBe('live');
        sockets[2].drop();
        vi.advanceTimersByTime(250);
        expect(sockets.length).toBe(4);
    });
});

describe('stream dispatch', () => {
    it('parses snapshots, tracks the latest one and the paused flag', () => {
        const { client, sockets, snapshots } = makeClient();
        client.connect();
        sockets[0].open();
        sockets[0].receive({ type: 'snapshot', payload: makeSnapshot({ seq: 3, step: 10 }) });
        sockets[0].receive({ type: 'snapshot',
                             payload: makeSnapshot({ seq: 4, step: 12, paused: true }) });
        expect(snapshots.map((s) => s.step)).toEqual([10, 12]);
        expect(client.latestSnapshot?.seq).toBe(4);
        expect(client.paused).toBe(true);
    });

    it('routes errors without a command id to the server error handler', () => {
        const { client, sockets, serverErrors } = makeClient();
        client.connect();
        sockets[0].open();
        sockets[0].receive({ type: 'error', payload: { command_id: null, message: 'bad frame' } });
        expect(serverErrors).toEqual(['bad frame']);
    });
});

describe('commands and acks', () => {
    it('sending before the socket is live throws', () => {
        const { client } = makeClient();
        client.connect();
        expect(() => client.setL(3.0)).toThrow('not connected');
    });

    it('resolves the pending promise when the ack arrives', async () => {
        const { client, sockets } = makeClient();
        client.connect();
        sockets[0].open();
        const pending = client.setL(3.0)!;
        const sentFrame = JSON.parse(sockets[0].sent[0]);
        expect(sentFrame.type).toBe('command');
        expect(sentFrame.payload.kind).toBe('set_l');
        expect(sentFrame.payload.value).toBe(3.0);
        expect(client.pendingCount).toBe(1);
        sockets[0].receive({ type: 'ack', payload: { command_id: pending.id, step: 17 } });
        await expect(pending.step).resolves.toBe(17);
        expect(client.pendingCount).toBe(0);
    });

    it('rejects the pending promise on a matching error frame', async () => {
        const { client, sockets, serverErrors } = makeClient();
        client.connect();
        sockets[0].open();
        const pending = client.setL(-1.0)!;
        sockets[0].receive({ type: 'error', payload: {
            command_id: pending.id, message: 'l must be positive' } });
        await expect(pending.step).rejects.toThrow('l must be positive');
        expect(serverErrors).toEqual([]);
    });

    it('distinct commands get distinct ids and settle independently', async () => {
        const { client, sockets } = makeClient();
        client.connect();
        sockets[0].open();
        const first = client.setCenter(100, 200)!;
        const second = client.setTrailWidth(20)!;
        expect(first.id).not.toBe(second.id);
        sockets[0].receive({ type: 'ack', payload: { command_id: second.id, step: 9 } });
        await expect(second.step).resolves.toBe(9);
        expect(client.pendingCount).toBe(1);
        sockets[0].receive({ type: 'ack', payload: { command_id: first.id, step: 10 } });
        await expect(first.step).resolves.toBe(10);
    });

    it('rejects pending commands when the connection drops', async () => {
        vi.useFakeTimers();
        const { client, sockets } = makeClient();
        client.connect();
        sockets[0].open();
        const pending = client.pause()!;
        sockets[0].drop();
        await expect(pending.step).rejects.toThrow('connection lost');
        vi.useRealTimers();
    });
});

describe('paused guard', () => {
    it('suppresses everything but resume while the session is paused', () => {
        const { client, sockets } = makeClient();
        client.connect();
        sockets[0].open();
        sockets[0].receive({ type: 'snapshot', payload: makeSnapshot({ paused: true }) });
        expect(client.setL(3.0)).toBeNull();
        expect(client.setCenter(1, 2)).toBeNull();
        expect(client.setTrailWidth(9)).toBeNull();
        expect(client.pause()).toBeNull();
        expect(sockets[0].sent).toEqual([]);
        const pending = client.resume();
        expect(pending).not.toBeNull();
        expect(JSON.parse(sockets[0].sent[0]).payload.kind).toBe('resume');
        pending!.step.catch(() => undefined);
    });

    it('lifts the guard once a running snapshot arrives', () => {
        const { client, sockets } = makeClient();
        client.connect();
        sockets[0].open();
        sockets[0].receive({ type: 'snapshot', payload: makeSnapshot({ paused: true }) });
        sockets[0].receive({ type: 'snapshot', payload: makeSnapshot({ paused: false }) });
        const pending = client.setL(2.0);
        expect(pending).not.toBeNull();
        expect(sockets[0].sent.length).toBe(1);
        pending!.step.catch(() => undefined);
    });
});
