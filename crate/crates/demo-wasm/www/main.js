import init, { diffraction_pattern, frft_magnitude, fractional_wvd } from "./pkg/fracfield_demo.js";

const N = 128;
const $ = (id) => document.getElementById(id);

function paint(canvas, frame) {
  const ctx = canvas.getContext("2d");
  const img = new ImageData(new Uint8ClampedArray(frame.rgba()), frame.width, frame.height);
  ctx.putImageData(img, 0, 0);
}

function guard(statsEl, fn) {
  try {
    fn();
  } catch (e) {
    statsEl.textContent = String(e);
  }
}

function drawDiffraction() {
  const d = +$("diff-d").value, a = +$("diff-a").value;
  $("diff-d-out").value = d;
  $("diff-a-out").value = a;
  guard($("diff-stats"), () => {
    const f = diffraction_pattern(N, 500, d, 1.0, a, $("diff-log").checked);
    paint($("diff"), f);
    $("diff-stats").textContent = `p  = ${f.order.toFixed(4)}\ns2 = ${f.scale.toFixed(4)}`;
    f.free();
  });
}

function drawFrft() {
  const p = +$("frft-p").value, s = +$("frft-s").value;
  $("frft-p-out").value = p;
  $("frft-s-out").value = s;
  guard($("frft-stats"), () => {
    const f = frft_magnitude(N, p, s, $("frft-flip").checked);
    paint($("frft"), f);
    $("frft-stats").textContent = `relative change ${f.change.toExponential(3)}`;
    f.free();
  });
}

function drawWvd() {
  const a = +$("wvd-a").value, c = +$("wvd-c").value;
  $("wvd-a-out").value = a;
  $("wvd-c-out").value = c;
  guard($("wvd-stats"), () => {
    const f = fractional_wvd(N, a, c);
    paint($("wvd"), f);
    $("wvd-stats").textContent = `p = ${f.order.toFixed(3)}`;
    f.free();
  });
}

await init();
for (const id of ["diff-d", "diff-a", "diff-log"]) $(id).addEventListener("input", drawDiffraction);
for (const id of ["frft-p", "frft-s", "frft-flip"]) $(id).addEventListener("input", drawFrft);
for (const id of ["wvd-a", "wvd-c"]) $(id).addEventListener("input", drawWvd);
drawDiffraction();
drawFrft();
drawWvd();
