/** End-to-end checks against a live painting service over HTTP + WebSocket. */
import { spawn, type ChildProcess } from 'node:child_process';
import WebSocket from 'ws';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';
import { SessionClient, type SocketLike } from '../src/client.js';
import {
    createSession,
    type Done,
    type SessionInfo,
    type Snapshot,
} from '../src/protocol.js';
import { StudioViewModel } from '../src/viewmodel.js';
import { decodePng, decodePngRgb } from './png.js';

const port = 23000 + Math.floor(Math.random() * 2000);
const baseUrl = `http://127.0.0.1:${port}`;
let server: ChildProcess;
const serverLogs: string[] = [];

const socketFactory = (url: string) => new WebSocket(url) as unknown as SocketLike;

async function until(check: () => boolean, timeoutMs = 20_000, what = 'condition') {
    const start = Date.now();
    while (!check()) {
        if (Date.now() - start > timeoutMs) {
            throw new Error(`timed out waiting for ${what}`);
        }
        await new Promise((resolve) => setTimeout(resolve, 10));
    }
}

beforeAll(async () => {
    server = spawn('python3', [
        '-m', 'uvicorn', 'swarmbrush.service:app',
        '--host', '127.0.0.1', '--port', String(port), '--log-level', 'warning',
    ], { stdio: ['ignore', 'pipe', 'pipe'] });
    server.stdout?.on('data', (chunk: Buffer) => serverLogs.push(chunk.toString()));
    server.stderr?.on('data', (chunk: Buffer) => serverLogs.push(chunk.toString()));
    const start = Date.now();
    for (;;) {
        if (server.exitCode !== null) {
            throw new Error(`service exited early:\n${serverLogs.join('')}`);
        }
        try {
            const response = await fetch(`${baseUrl}/sessions`);
            if (response.ok) return;
        } catch {
            // not listening yet
        }
        if (Date.now() - start > 30_000) {
            throw new Error(`service never came up:\n${serverLogs.join('')}`);
        }
        await new Promise((resolve) => setTimeout(resolve, 100));
    }
});

afterAll(async () => {
    if (server === undefined || server.exitCode !== null) return;
    server.kill('SIGTERM');
    await new Promise<void>((resolve) => {
        const hardStop = setTimeout(() => {
            server.kill('SIGKILL');
            resolve();
        }, 3000);
        server.once('exit', () => {
            clearTimeout(hardStop);
            resolve();
        });
    });
});

interface Run {
    client: SessionClient;
    session: SessionInfo;
    snapshots: Snapshot[];
    errors: string[];
    done: Done | null;
}

function openClient(session: SessionInfo): Run {
    const run: Run = { client: undefined as unknown as SessionClient,
                       session, snapshots: [], errors: [], done: null };
    run.client = new SessionClient(baseUrl + session.stream_url, {
        socketFactory,
        onSnapshot: (snapshot) => run.snapshots.push(snapshot),
        onServerError: (error) => run.errors.push(error.message),
        onDone: (done) => { run.done = done; },
    });
    run.client.connect();
    return run;
}

async function fetchPainting(session: SessionInfo): Promise<Buffer> {
    const response = await fetch(baseUrl + session.painting_url);
    expect(response.status).toBe(200);
    return Buffer.from(await response.arrayBuffer());
}

const interactionBody = {
    timeline: {
        key: { tonic: 0, mode: 'major' },
        tempos: [{ onset: 0.0, bpm: 120.0 }],
        chords: [{ onset: 0.0, duration: 4.0, root: 0, quality: 'major' }],
    },
    config: {
        n_robots: 3,
        grid_resolution: 48,
        canvas_size: [100.0, 100.0],
        tau: 0.0,
        seed: 11,
        trail_width: 8.0,
    },
    pace: 2.0,
    duration: 4.0,
};

describe('interaction round-trip', () => {
    it('acked commands show up in the next snapshot; a rejected one is a no-op',
       async () => {
        const startedAt = Date.now();

        // Steered session: every accepted command must become visible state.
        const session = await createSession(baseUrl, interactionBody);
        const run = openClient(session);
        await until(() => run.snapshots.some((s) => s.densities.length > 0),
                    15_000, 'first painted snapshot');

        const center = run.client.setCenter(60.0, 40.0);
        expect(center).not.toBeNull();
        const centerStep = await center!.step;
        await until(() => run.snapshots.some((s) => s.step > centerStep),
                    15_000, 'snapshot after set_center ack');
        const afterCenter = run.snapshots.find((s) => s.step > centerStep)!;
        expect(afterCenter.densities.length).toBeGreaterThan(0);
        for (const density of afterCenter.densities) {
            expect(density.center).toEqual([60.0, 40.0]);
        }

        const setL = run.client.setL(3.0);
        const lStep = await setL!.step;
        await until(() => run.snapshots.some((s) => s.step > lStep),
                    15_000, 'snapshot after set_l ack');
        expect(run.snapshots.find((s) => s.step > lStep)!.l).toBe(3.0);

        // While paused the client refuses to emit anything except resume.
        await run.client.pause()!.step;
        await until(() => run.client.paused, 15_000, 'paused snapshot');
        expect(run.client.setL(2.0)).toBeNull();
        expect(run.client.setCenter(10.0, 10.0)).toBeNull();
        const resume = run.client.resume();
        expect(resume).not.toBeNull();
        await resume!.step;
        await until(() => !run.client.paused, 15_000, 'running snapshot');

        await expect(run.client.setL(-1.0)!.step).rejects.toThrow(/positive/);

        await until(() => run.done !== null, 15_000, 'session end');
        expect(run.done!.clock).toBeCloseTo(4.0, 9);
        run.client.close();

        expect(Date.now() - startedAt).toBeLessThan(10_000);
    }, 20_000);

    it('a rejected command leaves the whole stream identical to a no-op replay',
       async () => {
        async function runSession(sendRejected: boolean): Promise<[Run, Buffer]> {
            const session = await createSession(baseUrl, interactionBody);
            const run = openClient(session);
            if (sendRejected) {
                await until(() => run.snapshots.length > 0, 15_000, 'first snapshot');
                await expect(run.client.setL(-5.0)!.step).rejects.toThrow(/positive/);
            }
            await until(() => run.done !== null, 20_000, 'session end');
            run.client.close();
            return [run, await fetchPainting(session)];
        }

        const [[control, controlPng], [rejected, rejectedPng]] = await Promise.all(
            [runSession(false), runSession(true)]);

        expect(controlPng.equals(rejectedPng)).toBe(true);

        // Broadcast snapshots line up step for step; only the private
        // subscribe keyframe depends on when each client attached.
        const bySeqless = (run: Run) => {
            const map = new Map<number, string>();
            for (const snapshot of run.snapshots.slice(1)) {
                map.set(snapshot.step, JSON.stringify({ ...snapshot, seq: 0 }));
            }
            return map;
        };
        const controlMap = bySeqless(control);
        const rejectedMap = bySeqless(rejected);
        const shared = [...controlMap.keys()].filter((step) => rejectedMap.has(step));
        expect(shared.length).toBeGreaterThanOrEqual(10);
        for (const step of shared) {
            expect(rejectedMap.get(step)).toBe(controlMap.get(step));
        }
    }, 25_000);
});

describe('canvas reconstruction', () => {
    it('the delta-rendered canvas is pixel-identical to the served painting',
       async () => {
        const chords: Record<string, unknown>[] = [];
        const roots = [0, 5, 7, 9, 2, 4];
        const qualities = ['major', 'minor', 'dominant7'];
        for (let i = 0; 4.0 + i * 1.3 < 30.0; i++) {
            chords.push({
                onset: 4.0 + i * 1.3,
                duration: 1.3,
                root: roots[i % roots.length],
                quality: qualities[i % qualities.length],
            });
        }
        const session = await createSession(baseUrl, {
            timeline: {
                key: { tonic: 0, mode: 'major' },
                tempos: [
                    { onset: 0.0, bpm: 60.0 },
                    { onset: 10.0, bpm: 120.0 },
                    { onset: 20.0, bpm: 170.0 },
                ],
                chords,
            },
            config: {
                n_robots: 3,
                grid_resolution: 48,
                canvas_size: [100.0, 100.0],
                seed: 7,
                trail_width: 8.0,
            },
            pace: 10.0,
            duration: 30.0,
        });

        // The first four silent seconds guarantee the subscribe keyframe is
        // taken from an untouched canvas, so the local floats start exactly
        // where the server's did and every later stamp replays bit for bit.
        const decodedKeyframes: Uint8Array[] = [];
        const vm = new StudioViewModel(session, baseUrl, {
            socketFactory,
            decodePng: (png) => {
                const rgb = decodePngRgb(png);
                decodedKeyframes.push(rgb);
                return rgb;
            },
        });
        vm.connect();

        await until(() => vm.synced, 15_000, 'keyframe sync');
        expect(decodedKeyframes.length).toBe(1);
        expect(decodedKeyframes[0].every((v) => v === 255)).toBe(true);

        await until(() => vm.done !== null, 60_000, 'session end');
        expect(vm.done!.clock).toBeCloseTo(30.0, 9);
        vm.close();

        const served = decodePng(new Uint8Array(await fetchPainting(session)));
        expect(served.width).toBe(vm.paint.widthPx);
        expect(served.height).toBe(vm.paint.heightPx);
        const local = vm.paint.toRgb8();
        expect(local.some((v) => v !== 255)).toBe(true);
        expect(Buffer.from(local).equals(Buffer.from(served.rgb))).toBe(true);
    }, 90_000);
});
