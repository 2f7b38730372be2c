use std::f64::consts::TAU;

use super::spec::{Occluder, SceneSpec};
use crate::error::Result;
use crate::geometry::BBox;
use crate::mot_io::{sort_rows, DetectionRow, FlowField, SequenceInfo};

/// Materialized trajectory of one object.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectTrack {
    /// Ground-truth identity (object index + 1).
    pub id: i64,
    pub birth: u32,
    pub death: u32,
    pub w: f64,
    pub h: f64,
    centers: Vec<[f64; 2]>,
    steps: Vec<[f32; 2]>,
}

impl ObjectTrack {
    pub fn alive(&self, frame: u32) -> bool {
        (self.birth..=self.death).contains(&frame)
    }

    pub fn center(&self, frame: u32) -> Option<[f64; 2]> {
        self.alive(frame).then(|| self.centers[(frame - self.birth) as usize])
    }

    pub fn bbox(&self, frame: u32) -> Option<BBox> {
        self.center(frame).map(|[cx, cy]| BBox::new(cx, cy, self.w, self.h))
    }

    /// Displacement from `frame - 1` to `frame`, when alive at both.
    pub fn step(&self, frame: u32) -> Option<[f32; 2]> {
        (frame > self.birth && frame <= self.death).then(|| self.steps[(frame - self.birth - 1) as usize])
    }
}

/// Ground truth of a synthetic sequence. Flow fields are computed on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneTruth {
    spec: SceneSpec,
    objects: Vec<ObjectTrack>,
    gt: Vec<DetectionRow>,
}

/// Unoccluded fraction of a box.
pub fn visibility(b: &BBox, occluders: &[Occluder]) -> f64 {
    let (l, t, r, btm) = (b.left(), b.top(), b.right(), b.bottom());
    let clipped: Vec<[f64; 4]> = occluders
        .iter()
        .map(|o| [o.left.max(l), o.top.max(t), (o.left + o.width).min(r), (o.top + o.height).min(btm)])
        .filter(|c| c[0] < c[2] && c[1] < c[3])
        .collect();
    if clipped.is_empty() {
        return 1.0;
    }
    let axis = |lo: usize, hi: usize, a: f64, z: f64| {
        let mut v: Vec<f64> = clipped.iter().flat_map(|c| [c[lo], c[hi]]).chain([a, z]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let xs = axis(0, 2, l, r);
    let ys = axis(1, 3, t, btm);
    let mut covered = 0.0;
    for xw in xs.windows(2) {
        for yw in ys.windows(2) {
            let inside = clipped
                .iter()
                .any(|c| c[0] <= xw[0] && xw[1] <= c[2] && c[1] <= yw[0] && yw[1] <= c[3]);
            if inside {
                covered += (xw[1] - xw[0]) * (yw[1] - yw[0]);
            }
        }
    }
    (1.0 - covered / ((r - l) * (btm - t))).clamp(0.0, 1.0)
}

fn materialize(index: usize, spec: &SceneSpec) -> ObjectTrack {
    let o = &spec.objects[index];
    let [l, t, w, h] = o.bbox;
    let [vx, vy] = o.velocity;
    let speed = vx.hypot(vy);
    let normal = if speed > 0.0 { [-vy / speed, vx / speed] } else { [0.0, 1.0] };
    let pos = |k: u32| -> [f64; 2] {
        let k = f64::from(k);
        let off = o.lateral.map_or(0.0, |lat| lat.amplitude * (TAU * k / lat.period).sin());
        [vx * k + normal[0] * off, vy * k + normal[1] * off]
    };
    let n = (o.death - o.birth) as usize;
    let mut centers = Vec::with_capacity(n + 1);
    let mut steps = Vec::with_capacity(n);
    let mut c = [l + w / 2.0, t + h / 2.0];
    centers.push(c);
    for k in 1..=n as u32 {
        let (a, b) = (pos(k - 1), pos(k));
        // steps are f32 so that summing the emitted flow is exact
        let s = [(b[0] - a[0]) as f32, (b[1] - a[1]) as f32];
        c = [c[0] + f64::from(s[0]), c[1] + f64::from(s[1])];
        steps.push(s);
        centers.push(c);
    }
    ObjectTrack {
        id: index as i64 + 1,
        birth: o.birth,
        death: o.death,
        w,
        h,
        centers,
        steps,
    }
}

/// Builds the ground truth of a scene.
pub fn generate_scene(spec: &SceneSpec) -> Result<SceneTruth> {
    spec.validate()?;
    let objects: Vec<ObjectTrack> = (0..spec.objects.len()).map(|i| materialize(i, spec)).collect();
    let mut gt = Vec::new();
    for obj in &objects {
        for f in obj.birth..=obj.death {
            let b = obj.bbox(f).expect("alive");
            let mut row = DetectionRow::from_bbox(f, obj.id, &b, 1.0);
            row.visibility = visibility(&b, &spec.occluders);
            gt.push(row);
        }
    }
    sort_rows(&mut gt);
    Ok(SceneTruth {
        spec: spec.clone(),
        objects,
        gt,
    })
}

impl SceneTruth {
    pub fn spec(&self) -> &SceneSpec {
        &self.spec
    }

    pub fn objects(&self) -> &[ObjectTrack] {
        &self.objects
    }

    /// Ground-truth rows with visibility, canonically sorted.
    pub fn gt_rows(&self) -> &[DetectionRow] {
        &self.gt
    }

    pub fn frames(&self) -> u32 {
        self.spec.frames
    }

    pub fn width(&self) -> u32 {
        self.spec.width
    }

    pub fn height(&self) -> u32 {
        self.spec.height
    }

    pub fn sequence_info(&self) -> SequenceInfo {
        SequenceInfo {
            name: self.spec.name.clone(),
            frame_rate: self.spec.frame_rate,
            seq_length: self.spec.frames,
            im_width: self.spec.width,
            im_height: self.spec.height,
        }
    }

    /// Exact flow from `frame - 1` to `frame`; zero at frame 1.
    ///
    /// Pixels of each object's box at `frame - 1` carry its displacement.
    /// Where boxes overlap, the later-born object wins.
    pub fn flow(&self, frame: u32) -> Result<FlowField> {
        let (w, h) = (self.spec.width, self.spec.height);
        let mut flow = FlowField::zeros(w, h)?;
        let mut order: Vec<&ObjectTrack> = self.objects.iter().filter(|o| o.step(frame).is_some()).collect();
        order.sort_by_key(|o| o.birth);
        let data = flow.data_mut();
        for obj in order {
            let step = obj.step(frame).expect("filtered");
            let b = obj.bbox(frame - 1).expect("alive");
            let span = |lo: f64, hi: f64, n: u32| {
                let a = lo.ceil().max(0.0).min(f64::from(n)) as usize;
                let z = hi.ceil().max(0.0).min(f64::from(n)) as usize;
                a..z
            };
            let xs = span(b.left(), b.right(), w);
            for y in span(b.top(), b.bottom(), h) {
                let row = &mut data[y * w as usize..(y + 1) * w as usize];
                row[xs.clone()].fill(step);
            }
        }
        Ok(flow)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::spec::{Lateral, ObjectSpec};

    fn one_object(velocity: [f64; 2], lateral: Option<Lateral>) -> SceneSpec {
        let mut s = SceneSpec::new(300, 200, 10);
        s.objects.push(ObjectSpec {
            birth: 1,
            death: 10,
            bbox: [50.0, 50.0, 20.0, 40.0],
            velocity,
            lateral,
        });
        s
    }

    #[test]
    fn static_object() {
        let t = generate_scene(&one_object([0.0, 0.0], None)).unwrap();
        let first = t.gt_rows()[0];
        assert!(t.gt_rows().iter().all(|r| (r.bb_left, r.bb_top) == (first.bb_left, first.bb_top)));
        for f in 1..=10 {
            assert!(t.flow(f).unwrap().data().iter().all(|c| *c == [0.0, 0.0]));
        }
    }

    #[test]
    fn constant_velocity_is_exact() {
        let t = generate_scene(&one_object([2.0, 0.0], None)).unwrap();
        let o = &t.objects()[0];
        for f in 2..=10 {
            assert_eq!(o.center(f).unwrap()[0] - o.center(f - 1).unwrap()[0], 2.0);
        }
        let flow = t.flow(5).unwrap();
        let [cx, cy] = o.center(4).unwrap();
        assert_eq!(flow.get(cx as u32, cy as u32), [2.0, 0.0]);
        assert_eq!(flow.get(0, 0), [0.0, 0.0]);
    }

    #[test]
    fn integrated_flow_matches_centers() {
        let t = generate_scene(&one_object([1.3, -0.7], Some(Lateral { amplitude: 6.0, period: 7.0 }))).unwrap();
        let o = &t.objects()[0];
        let mut c = o.center(1).unwrap();
        for f in 2..=10 {
            let uv = t.flow(f).unwrap().get(c[0].round() as u32, c[1].round() as u32);
            c = [c[0] + f64::from(uv[0]), c[1] + f64::from(uv[1])];
            let truth = o.center(f).unwrap();
            assert!((c[0] - truth[0]).abs() < 1e-6 && (c[1] - truth[1]).abs() < 1e-6);
        }
    }

    #[test]
    fn visibility_geometry() {
        let b = BBox::from_ltwh(0.0, 0.0, 10.0, 10.0);
        let occ = |l, t, w, h| Occluder { left: l, top: t, width: w, height: h };
        assert_eq!(visibility(&b, &[]), 1.0);
        assert_eq!(visibility(&b, &[occ(-5.0, -5.0, 30.0, 30.0)]), 0.0);
        assert_eq!(visibility(&b, &[occ(5.0, -5.0, 30.0, 30.0)]), 0.5);
        // overlapping occluders are not double counted
        assert_eq!(visibility(&b, &[occ(0.0, 0.0, 5.0, 10.0), occ(2.5, 0.0, 5.0, 10.0)]), 0.25);
    }

    #[test]
    fn full_width_occluder_hides_exactly() {
        let mut s = SceneSpec::new(300, 200, 12);
        s.objects.push(ObjectSpec {
            birth: 1,
            death: 12,
            bbox: [0.0, 10.0, 20.0, 40.0],
            velocity: [0.0, 10.0],
            lateral: None,
        });
        // fully covers the box for tops 60, 70, 80
        s.occluders.push(Occluder { left: 0.0, top: 60.0, width: 300.0, height: 60.0 });
        let t = generate_scene(&s).unwrap();
        let hidden: Vec<u32> = t.gt_rows().iter().filter(|r| r.visibility == 0.0).map(|r| r.frame).collect();
        assert_eq!(hidden, vec![6, 7, 8]);
    }

    #[test]
    fn later_born_object_on_top() {
        let mut s = SceneSpec::new(100, 100, 5);
        let obj = |birth, vx| ObjectSpec { birth, death: 5, bbox: [10.0, 10.0, 20.0, 20.0], velocity: [vx, 0.0], lateral: None };
        s.objects.push(obj(2, 1.0));
        s.objects.push(obj(1, 3.0));
        let t = generate_scene(&s).unwrap();
        // at frame 3 both boxes cover pixel (21, 20); object 0 was born later
        assert_eq!(t.flow(3).unwrap().get(21, 20), [1.0, 0.0]);
    }
}
