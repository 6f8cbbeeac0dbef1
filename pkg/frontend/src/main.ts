/** Browser entry: wires the session view model to the studio page. */
import { StudioViewModel } from './viewmodel.js';
import { createSession } from './protocol.js';

const baseUrlInput = document.getElementById('base-url') as HTMLInputElement;
const timelineInput = document.getElementById('timeline-json') as HTMLTextAreaElement;
const paceInput = document.getElementById('pace') as HTMLInputElement;
const startButton = document.getElementById('start') as HTMLButtonElement;
const pauseButton = document.getElementById('pause') as HTMLButtonElement;
const statusEl = document.getElementById('status') as HTMLSpanElement;
const chordEl = document.getElementById('chord') as HTMLSpanElement;
const clockEl = document.getElementById('clock') as HTMLSpanElement;
const costEl = document.getElementById('cost') as HTMLSpanElement;
const toastsEl = document.getElementById('toasts') as HTMLDivElement;
const canvasEl = document.getElementById('painting') as HTMLCanvasElement;
const lSlider = document.getElementById('l-slider') as HTMLInputElement;
const lValueEl = document.getElementById('l-value') as HTMLSpanElement;
const widthSlider = document.getElementById('width-slider') as HTMLInputElement;
const widthValueEl = document.getElementById('width-value') as HTMLSpanElement;

const ctx = canvasEl.getContext('2d')!;

let model: StudioViewModel | null = null;
let dirty = false;

/** Decode a keyframe PNG to packed RGB8 via an offscreen canvas. */
async function decodePngInBrowser(png: Uint8Array): Promise<Uint8Array> {
    const bytes = new Uint8Array(png);
    const bitmap = await createImageBitmap(new Blob([bytes], { type: 'image/png' }));
    const off = document.createElement('canvas');
    off.width = bitmap.width;
    off.height = bitmap.height;
    const offCtx = off.getContext('2d')!;
    offCtx.drawImage(bitmap, 0, 0);
    const rgba = offCtx.getImageData(0, 0, bitmap.width, bitmap.height).data;
    const rgb = new Uint8Array(bitmap.width * bitmap.height * 3);
    for (let p = 0; p < bitmap.width * bitmap.height; p++) {
        rgb[p * 3] = rgba[p * 4];
        rgb[p * 3 + 1] = rgba[p * 4 + 1];
        rgb[p * 3 + 2] = rgba[p * 4 + 2];
    }
    return rgb;
}

function showToast(message: string): void {
    const toast = document.createElement('div');
    toast.className = 'toast';
    toast.textContent = message;
    toastsEl.appendChild(toast);
    setTimeout(() => toast.remove(), 4000);
}

function renderCanvas(vm: StudioViewModel): void {
    const { widthPx, heightPx } = vm.paint;
    if (canvasEl.width !== widthPx) canvasEl.width = widthPx;
    if (canvasEl.height !== heightPx) canvasEl.height = heightPx;
    const rgb = vm.paint.toRgb8();
    const image = ctx.createImageData(widthPx, heightPx);
    for (let p = 0; p < widthPx * heightPx; p++) {
        image.data[p * 4] = rgb[p * 3];
        image.data[p * 4 + 1] = rgb[p * 3 + 1];
        image.data[p * 4 + 2] = rgb[p * 3 + 2];
        image.data[p * 4 + 3] = 255;
    }
    ctx.putImageData(image, 0, 0);

    const scale = vm.paint.scale;
    const snapshot = vm.latestSnapshot;
    if (snapshot !== null) {
        for (const robot of snapshot.robots) {
            ctx.beginPath();
            ctx.arc(robot.x * scale, heightPx - robot.y * scale, 4, 0, 2 * Math.PI);
            ctx.fillStyle = '#222';
            ctx.fill();
        }
    }
    for (const marker of vm.markers) {
        ctx.beginPath();
        ctx.arc(marker.x * scale, heightPx - marker.y * scale, 8, 0, 2 * Math.PI);
        ctx.strokeStyle = '#d22';
        ctx.lineWidth = 2;
        ctx.stroke();
    }
}

function renderPanel(vm: StudioViewModel): void {
    statusEl.textContent = vm.done !== null ? 'done' : vm.status;
    const snapshot = vm.latestSnapshot;
    if (snapshot === null) return;
    clockEl.textContent = snapshot.clock.toFixed(2) + ' s';
    costEl.textContent = snapshot.cost.toExponential(3);
    if (snapshot.chord !== null) {
        const emotions = snapshot.chord.emotions.join(', ');
        chordEl.textContent = `${snapshot.chord.label} (${snapshot.chord.function ?? '-'})`
            + (emotions ? ` : ${emotions}` : '');
    } else {
        chordEl.textContent = 'silence';
    }
    pauseButton.textContent = snapshot.paused ? 'Resume' : 'Pause';
    lValueEl.textContent = snapshot.l.toFixed(2);
    widthValueEl.textContent = snapshot.trail_width.toFixed(1);
}

// Single rendering loop; stream callbacks only mark the frame dirty.
function frame(): void {
    if (model !== null && dirty) {
        dirty = false;
        renderCanvas(model);
        renderPanel(model);
    }
    requestAnimationFrame(frame);
}
requestAnimationFrame(frame);

async function start(): Promise<void> {
    if (model !== null) {
        model.close();
        model = null;
    }
    const baseUrl = baseUrlInput.value.replace(/\/$/, '');
    let timeline: unknown;
    try {
        timeline = JSON.parse(timelineInput.value);
    } catch {
        showToast('timeline is not valid JSON');
        return;
    }
    const pace = parseFloat(paceInput.value) || 1.0;
    let session;
    try {
        session = await createSession(baseUrl, { timeline, pace });
    } catch (error) {
        showToast(String(error));
        return;
    }
    const vm = new StudioViewModel(session, baseUrl, {
        decodePng: decodePngInBrowser,
        onRender: () => { dirty = true; },
        onToast: showToast,
    });
    model = vm;

    const [lMin, lMax] = vm.lBounds;
    lSlider.min = String(lMin);
    lSlider.max = String(lMax);
    lSlider.step = '0.05';
    lSlider.value = String(lMax);
    const [wMin, wMax] = vm.trailWidthBounds;
    widthSlider.min = String(wMin);
    widthSlider.max = String(wMax);
    widthSlider.step = '0.5';
    widthSlider.value = String(session.config.trail_width);

    vm.connect();
    dirty = true;
}

startButton.addEventListener('click', () => { void start(); });

pauseButton.addEventListener('click', () => {
    model?.togglePause();
});

lSlider.addEventListener('input', () => {
    model?.moveLSlider(parseFloat(lSlider.value));
});

widthSlider.addEventListener('input', () => {
    model?.moveTrailWidthSlider(parseFloat(widthSlider.value));
});

canvasEl.addEventListener('click', (event) => {
    const rect = canvasEl.getBoundingClientRect();
    model?.clickCanvas(
        event.clientX - rect.left, event.clientY - rect.top,
        rect.width, rect.height);
});

timelineInput.value = JSON.stringify({
    key: { tonic: 0, mode: 'major' },
    tempos: [{ onset: 0.0, bpm: 96.0 }],
    chords: [
        { onset: 0.0, duration: 4.0, root: 0, quality: 'major' },
        { onset: 4.0, duration: 4.0, root: 5, quality: 'major' },
        { onset: 8.0, duration: 4.0, root: 7, quality: 'dominant7' },
        { onset: 12.0, duration: 4.0, root: 0, quality: 'major' },
    ],
}, null, 2);
