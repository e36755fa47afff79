/** Operator console wiring: socket, keyboard, canvas, panels, sessions. */
import { encodeCamera, encodeDrive, encodeMode, encodeRecord, } from "./codec.js";
import { DriveSampler, KeyTracker, SAMPLE_HZ } from "./input.js";
import { RoverLink } from "./net.js";
import { fetchSessionList, fetchSessionLog, parseSessionLog, playSession } from "./sessions.js";
import { applyMessage, describeRange, initialState, PHASE_NAMES } from "./state.js";
import { drawFrame, overlayText, PanDial } from "./video.js";
const state = initialState();
const keys = new KeyTracker();
const sampler = new DriveSampler();
const dial = new PanDial();
const $ = (id) => document.getElementById(id);
const canvas = $("video");
const banner = $("banner");
const wsUrl = `ws://${location.host}/ws`;
let replayCancel = null;
let socketOpen = false;
const link = new RoverLink(wsUrl, {
    onMessage(msg) {
        applyMessage(state, msg);
        renderPanels();
        if (msg.kind === "video") {
            drawFrame(canvas, msg);
            overlayText(canvas, msg);
        }
    },
    onStatus(status) {
        socketOpen = status === "OPEN";
        if (status !== "OPEN")
            state.connection = status === "CONNECTING" ? "CONNECTING" : "DISCONNECTED";
        renderPanels();
    },
    onDecodeError() {
        state.decodeErrors += 1;
        renderPanels();
    },
});
function renderPanels() {
    const t = state.telemetry;
    $("conn").textContent = state.connection;
    banner.className = state.connection === "DISCONNECTED" ? "banner bad" : "banner";
    banner.textContent =
        state.connection === "DISCONNECTED"
            ? "link down, retrying..."
            : state.connection === "CONNECTING"
                ? "connecting..."
                : `connected as ${state.connection.toLowerCase()}`;
    $("pose").textContent = t
        ? `${t.x.toFixed(2)}, ${t.y.toFixed(2)} @ ${((t.heading * 180) / Math.PI).toFixed(0)}°`
        : "--";
    $("speed").textContent = t ? `${t.speed.toFixed(2)} m/s` : "--";
    $("range").textContent = describeRange(t);
    $("battery").textContent = t ? `${(t.batteryMv / 1000).toFixed(2)} V` : "--";
    $("phase").textContent = t ? PHASE_NAMES[t.phase] ?? `#${t.phase}` : "--";
    $("pan").textContent = t ? `${t.pan}° / ${t.tilt}°` : "--";
    $("mode").textContent = state.mode === 1 ? "AUTO" : "MANUAL";
    $("recdot").className = state.recording ? "dot on" : "dot";
    $("notices").textContent = state.notices.slice(-4).join("\n");
    $("decerr").textContent = String(state.decodeErrors);
}
// keyboard driving, sampled at 20 Hz
document.addEventListener("keydown", (e) => {
    if (e.target?.tagName === "INPUT")
        return;
    keys.keyDown(e.code);
});
document.addEventListener("keyup", (e) => keys.keyUp(e.code));
window.addEventListener("blur", () => keys.clear());
setInterval(() => {
    const cmd = sampler.sample(keys.current());
    if (cmd && socketOpen)
        link.send(encodeDrive(cmd.throttle, cmd.steer));
}, 1000 / SAMPLE_HZ);
// camera dial: drag horizontally to pan
let dragging = false;
let lastX = 0;
const dialEl = $("dial");
dialEl.addEventListener("pointerdown", (e) => {
    dragging = true;
    lastX = e.clientX;
    dialEl.setPointerCapture(e.pointerId);
});
dialEl.addEventListener("pointermove", (e) => {
    if (!dragging)
        return;
    const deltaDeg = dial.drag(e.clientX - lastX);
    lastX = e.clientX;
    if (deltaDeg !== 0)
        link.send(encodeCamera(deltaDeg, 0));
});
dialEl.addEventListener("pointerup", () => (dragging = false));
$("tilt-up").addEventListener("click", () => link.send(encodeCamera(0, 5)));
$("tilt-down").addEventListener("click", () => link.send(encodeCamera(0, -5)));
$("mode-manual").addEventListener("click", () => link.send(encodeMode(0)));
$("mode-auto").addEventListener("click", () => link.send(encodeMode(1)));
$("rec-start").addEventListener("click", () => link.send(encodeRecord(1)));
$("rec-stop").addEventListener("click", () => link.send(encodeRecord(0)));
$("snapshot").addEventListener("click", () => link.send(encodeRecord(2)));
// session review: fetch the log and play it into the same panels
async function refreshSessions() {
    const list = $("sessions");
    try {
        const names = await fetchSessionList("");
        list.innerHTML = "";
        for (const name of names) {
            const li = document.createElement("li");
            const a = document.createElement("a");
            a.textContent = name;
            a.href = "#";
            a.onclick = (e) => {
                e.preventDefault();
                void replaySession(name);
            };
            li.appendChild(a);
            list.appendChild(li);
        }
    }
    catch {
        list.innerHTML = "<li>(unavailable)</li>";
    }
}
async function replaySession(name) {
    replayCancel?.();
    const bytes = await fetchSessionLog("", name);
    const messages = parseSessionLog(bytes);
    banner.textContent = `replaying ${name} (${messages.length} messages)`;
    replayCancel = playSession(messages, 50, (msg) => {
        applyMessage(state, msg);
        renderPanels();
        if (msg.kind === "video") {
            drawFrame(canvas, msg);
            overlayText(canvas, msg);
        }
    }, () => (banner.textContent = `replay of ${name} finished`));
}
$("sessions-refresh").addEventListener("click", () => void refreshSessions());
link.start();
void refreshSessions();
renderPanels();
