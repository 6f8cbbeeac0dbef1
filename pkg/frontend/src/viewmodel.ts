/** Session view model: stream state plus a delta-rendered local canvas.
 *
 * The canvas starts unsynced. The first keyframe snapshot (the server sends
 * one immediately on subscribe) resets the raster to the server's pixels and
 * flips the model to synced; from then on only stamp deltas are applied, the
 * pixels of later keyframes are ignored. Stamps replayed on top of a synced
 * raster repeat the server's float arithmetic exactly, so the local canvas
 * ends byte-identical to the server's terminal PNG, while resetting from a
 * quantized mid-run keyframe would not. A reconnect drops back to unsynced,
 * and the keyframe served on resubscribe restores the picture.
 */
import { SessionClient, type ConnectionStatus, type PendingCommand, type SessionClientOptions } from './client.js';
import { clampToBounds, debounce, mapClickToWorld } from './controls.js';
import { PaintModel } from './paint.js';
import type { Done, SessionConfig, SessionInfo, Snapshot, StreamError } from './protocol.js';

/** Decode a PNG into packed RGB8 pixels; may be asynchronous in browsers. */
export type PngDecoder = (png: Uint8Array) => Uint8Array | Promise<Uint8Array>;

export interface ClickMarker {
    commandId: string;
    x: number;
    y: number;
}

export interface ViewModelOptions {
    decodePng: PngDecoder;
    socketFactory?: SessionClientOptions['socketFactory'];
    reconnectDelaysMs?: SessionClientOptions['reconnectDelaysMs'];
    /** Called whenever the canvas, status, or snapshot changed. */
    onRender?: () => void;
    onToast?: (message: string) => void;
    sliderWindowMs?: number;
}

export function base64ToBytes(base64: string): Uint8Array {
    const atobFn = (globalThis as { atob?: (data: string) => string }).atob;
    if (atobFn !== undefined) {
        const binary = atobFn(base64);
        const bytes = new Uint8Array(binary.length);
        for (let i = 0; i < binary.length; i++) bytes[i] = binary.charCodeAt(i);
        return bytes;
    }
    return new Uint8Array(Buffer.from(base64, 'base64'));
}

export class StudioViewModel {
    readonly config: SessionConfig;
    readonly paint: PaintModel;
    readonly client: SessionClient;
    readonly markers: ClickMarker[] = [];
    status: ConnectionStatus = 'connecting';
    latestSnapshot: Snapshot | null = null;
    done: Done | null = null;
    synced = false;
    /** Slider positions track the stream until the user drags them. */
    sliders = { l: 0, trailWidth: 0 };

    private readonly options: ViewModelOptions;
    private readonly decode: PngDecoder;
    private readonly emitL: (value: number) => void;
    private readonly emitTrailWidth: (value: number) => void;
    private backlog: Snapshot[] = [];
    private decoding = false;

    constructor(session: SessionInfo, baseUrl: string, options: ViewModelOptions) {
        this.config = session.config;
        this.options = options;
        this.decode = options.decodePng;
        this.paint = PaintModel.fromConfig(session.config);
        this.sliders.trailWidth = session.config.trail_width;
        this.sliders.l = session.config.motion.l_max;
        const windowMs = options.sliderWindowMs ?? 150;
        this.emitL = debounce((value) => this.sendSliderCommand('set_l', value), windowMs);
        this.emitTrailWidth = debounce(
            (value) => this.sendSliderCommand('set_trail_width', value), windowMs);
        this.client = new SessionClient(baseUrl + session.stream_url, {
            socketFactory: options.socketFactory,
            reconnectDelaysMs: options.reconnectDelaysMs,
            onSnapshot: (snapshot) => this.handleSnapshot(snapshot),
            onStatus: (status) => this.handleStatus(status),
            onDone: (payload) => {
                this.done = payload;
                this.options.onRender?.();
            },
            onServerError: (error) => this.handleServerError(error),
        });
    }

    connect(): void {
        this.client.connect();
    }

    close(): void {
        this.client.close();
    }

    /** Forward a click on the displayed canvas, world-mapped and tracked. */
    clickCanvas(offsetX: number, offsetY: number,
                elementWidth: number, elementHeight: number): void {
        const world = mapClickToWorld(
            offsetX, offsetY, elementWidth, elementHeight, this.config.canvas_size);
        if (world === null) return;
        const pending = this.client.setCenter(world[0], world[1]);
        if (pending === null) return;
        const marker = { commandId: pending.id, x: world[0], y: world[1] };
        this.markers.push(marker);
        this.options.onRender?.();
        pending.step
            .catch((error: Error) => this.options.onToast?.(error.message))
            .finally(() => {
                this.removeMarker(marker.commandId);
                this.options.onRender?.();
            });
    }

    /** Slider bounds come straight from the session config. */
    get lBounds(): [number, number] {
        return [this.config.motion.l_min, this.config.motion.l_max];
    }

    get trailWidthBounds(): [number, number] {
        return [0.5, this.config.max_trail_width];
    }

    moveLSlider(value: number): void {
        const [lo, hi] = this.lBounds;
        this.sliders.l = clampToBounds(value, lo, hi);
        this.emitL(this.sliders.l);
    }

    moveTrailWidthSlider(value: number): void {
        const [lo, hi] = this.trailWidthBounds;
        this.sliders.trailWidth = clampToBounds(value, lo, hi);
        this.emitTrailWidth(this.sliders.trailWidth);
    }

    togglePause(): void {
        const pending = this.client.paused ? this.client.resume() : this.client.pause();
        pending?.step.catch((error: Error) => this.options.onToast?.(error.message));
    }

    private sendSliderCommand(kind: 'set_l' | 'set_trail_width', value: number): void {
        if (this.client.status !== 'live' || this.client.finished) return;
        const pending = this.client.send({ kind, value });
        pending?.step.catch((error: Error) => this.options.onToast?.(error.message));
    }

    private handleStatus(status: ConnectionStatus): void {
        this.status = status;
        if (status === 'reconnecting') {
            // Stamps were lost with the socket; wait for the next keyframe.
            this.synced = false;
            this.backlog = [];
        }
        this.options.onRender?.();
    }

    private handleServerError(error: StreamError): void {
        this.options.onToast?.(error.message);
    }

    private handleSnapshot(snapshot: Snapshot): void {
        this.latestSnapshot = snapshot;
        if (this.decoding) {
            this.backlog.push(snapshot);
            return;
        }
        this.applySnapshot(snapshot);
        this.options.onRender?.();
    }

    private applySnapshot(snapshot: Snapshot): void {
        if (this.synced) {
            this.paint.applyStamps(snapshot.stamps);
            return;
        }
        if (snapshot.keyframe === null) return;
        const bytes = base64ToBytes(snapshot.keyframe.png_base64);
        const decoded = this.decode(bytes);
        if (decoded instanceof Promise) {
            this.decoding = true;
            void decoded.then((pixels) => {
                this.paint.setFromRgb8(pixels);
                this.synced = true;
                this.decoding = false;
                const queued = this.backlog;
                this.backlog = [];
                for (const later of queued) this.applySnapshot(later);
                this.options.onRender?.();
            });
            return;
        }
        this.paint.setFromRgb8(decoded);
        this.synced = true;
    }

    private removeMarker(commandId: string): void {
        const index = this.markers.findIndex((m) => m.commandId === commandId);
        if (index >= 0) this.markers.splice(index, 1);
    }
}
