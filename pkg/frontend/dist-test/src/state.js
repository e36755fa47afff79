/** Console state, derived purely from received messages. */
import { EV_CMD_REJECTED, EV_RECORDING, EV_ROLE, EV_BLOCKED, EV_BROWNOUT, EV_COLLISION, EV_SNAPSHOT, EV_RECORD_ERROR, } from "./codec.js";
export function initialState() {
    return {
        connection: "DISCONNECTED",
        telemetry: null,
        frame: null,
        mode: 0,
        recording: false,
        sessions: [],
        notices: [],
        decodeErrors: 0,
        framesReceived: 0,
    };
}
const EVENT_LABELS = {
    [EV_COLLISION]: "collision",
    [EV_BROWNOUT]: "power brownout: camera offline",
    [EV_SNAPSHOT]: "snapshot saved",
    [EV_RECORD_ERROR]: "recording error",
    [EV_BLOCKED]: "rover blocked, operator needed",
};
function pushNotice(state, text) {
    state.notices.push(text);
    if (state.notices.length > 8)
        state.notices.shift();
}
/** Fold one received message into the console state. */
export function applyMessage(state, msg) {
    switch (msg.kind) {
        case "telemetry":
            state.telemetry = msg;
            state.mode = msg.mode;
            break;
        case "video":
            state.frame = msg;
            state.framesReceived += 1;
            break;
        case "event":
            if (msg.code === EV_ROLE) {
                state.connection = msg.detail === 0 ? "DRIVER" : "OBSERVER";
            }
            else if (msg.code === EV_CMD_REJECTED) {
                // commands bounced: we are not the driver
                state.connection = "OBSERVER";
                pushNotice(state, "command rejected (observer)");
            }
            else if (msg.code === EV_RECORDING) {
                state.recording = msg.detail === 1;
            }
            else if (EVENT_LABELS[msg.code]) {
                pushNotice(state, EVENT_LABELS[msg.code]);
            }
            break;
        default:
            break; // command echoes are not expected from the rover
    }
    return state;
}
export function describeRange(t) {
    if (!t)
        return "--";
    return t.rangeCm === 0xffff ? "clear" : `${(t.rangeCm / 100).toFixed(2)} m`;
}
export const PHASE_NAMES = ["FORWARD", "AVOID_STOP", "TURN_LEFT", "TURN_RIGHT"];
