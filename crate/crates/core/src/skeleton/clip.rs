use crate::error::{Error, Result};

/// Joint coordinates of a clip, `frames x actors x joints x dims`, with a
/// validity flag per `(frame, actor, joint)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonClip {
    pub id: String,
    pub label: Option<usize>,
    frames: usize,
    actors: usize,
    joints: usize,
    dims: usize,
    coords: Vec<f64>,
    valid: Vec<bool>,
}

impl SkeletonClip {
    pub fn new(
        id: impl Into<String>,
        shape: [usize; 4],
        coords: Vec<f64>,
        valid: Vec<bool>,
    ) -> Result<Self> {
        let [frames, actors, joints, dims] = shape;
        if frames == 0 || actors == 0 {
            return Err(Error::input("clip needs at least one frame and one actor"));
        }
        if joints < 2 {
            return Err(Error::input("clip needs at least two joints"));
        }
        if !(2..=3).contains(&dims) {
            return Err(Error::input(format!("joint dimension must be 2 or 3, got {dims}")));
        }
        let entries = frames * actors * joints;
        if coords.len() != entries * dims || valid.len() != entries {
            return Err(Error::input(format!(
                "clip buffers ({} coords, {} flags) do not match shape {shape:?}",
                coords.len(),
                valid.len()
            )));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("clip contains non-finite coordinates"));
        }
        Ok(Self {
            id: id.into(),
            label: None,
            frames,
            actors,
            joints,
            dims,
            coords,
            valid,
        })
    }

    /// A clip with every entry valid.
    pub fn dense(id: impl Into<String>, shape: [usize; 4], coords: Vec<f64>) -> Result<Self> {
        let flags = vec![true; shape[0] * shape[1] * shape[2]];
        Self::new(id, shape, coords, flags)
    }

    pub fn with_label(mut self, label: usize) -> Self {
        self.label = Some(label);
        self
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn actors(&self) -> usize {
        self.actors
    }

    pub fn joints(&self) -> usize {
        self.joints
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    fn entry(&self, frame: usize, actor: usize, joint: usize) -> usize {
        (frame * self.actors + actor) * self.joints + joint
    }

    pub fn joint(&self, frame: usize, actor: usize, joint: usize) -> &[f64] {
        let e = self.entry(frame, actor, joint) * self.dims;
        &self.coords[e..e + self.dims]
    }

    pub fn joint_mut(&mut self, frame: usize, actor: usize, joint: usize) -> &mut [f64] {
        let e = self.entry(frame, actor, joint) * self.dims;
        &mut self.coords[e..e + self.dims]
    }

    pub fn is_valid(&self, frame: usize, actor: usize, joint: usize) -> bool {
        self.valid[self.entry(frame, actor, joint)]
    }

    pub fn set_valid(&mut self, frame: usize, actor: usize, joint: usize, flag: bool) {
        let e = self.entry(frame, actor, joint);
        self.valid[e] = flag;
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Whether the actor has any valid joint anywhere in the clip.
    pub fn actor_present(&self, actor: usize) -> bool {
        (0..self.frames).any(|f| (0..self.joints).any(|j| self.is_valid(f, actor, j)))
    }

    /// Number of actors with at least one valid joint.
    pub fn detected_actors(&self) -> usize {
        (0..self.actors).filter(|&a| self.actor_present(a)).count()
    }

    /// Stacks the listed actors into one body of `slots * joints` joints.
    /// Slots without an actor, or actors absent from the clip, stay at zero.
    pub fn body(&self, actors: &[usize], slots: usize) -> Result<BodyFrames> {
        if slots == 0 {
            return Err(Error::input("body needs at least one actor slot"));
        }
        if let Some(&a) = actors.iter().find(|&&a| a >= self.actors) {
            return Err(Error::input(format!("actor {a} out of range ({} actors)", self.actors)));
        }
        let joints = slots * self.joints;
        let mut coords = vec![0.0; self.frames * joints * self.dims];
        for f in 0..self.frames {
            for (slot, &a) in actors.iter().take(slots).enumerate() {
                for j in 0..self.joints {
                    if !self.is_valid(f, a, j) {
                        continue;
                    }
                    let dst = (f * joints + slot * self.joints + j) * self.dims;
                    coords[dst..dst + self.dims].copy_from_slice(self.joint(f, a, j));
                }
            }
        }
        Ok(BodyFrames {
            frames: self.frames,
            joints,
            dims: self.dims,
            coords,
        })
    }
}

/// One articulated body over time: `frames x joints x dims`, all entries defined.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyFrames {
    frames: usize,
    joints: usize,
    dims: usize,
    coords: Vec<f64>,
}

impl BodyFrames {
    pub fn new(frames: usize, joints: usize, dims: usize, coords: Vec<f64>) -> Result<Self> {
        if frames == 0 || joints == 0 || dims == 0 || coords.len() != frames * joints * dims {
            return Err(Error::input(format!(
                "body buffer of {} values does not match {frames}x{joints}x{dims}",
                coords.len()
            )));
        }
        Ok(Self {
            frames,
            joints,
            dims,
            coords,
        })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn joints(&self) -> usize {
        self.joints
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// All joints of one frame, row-major `joints x dims`.
    pub fn frame(&self, f: usize) -> &[f64] {
        let w = self.joints * self.dims;
        &self.coords[f * w..(f + 1) * w]
    }

    pub fn joint(&self, f: usize, j: usize) -> &[f64] {
        let e = (f * self.joints + j) * self.dims;
        &self.coords[e..e + self.dims]
    }

    /// Trajectory of one joint over all frames, frame-major.
    pub fn trajectory(&self, j: usize) -> Vec<f64> {
        (0..self.frames).flat_map(|f| self.joint(f, j).iter().copied()).collect()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Static facts about a skeleton layout shared by every clip of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetDescriptor {
    pub joints: usize,
    pub dims: usize,
    /// Joints listed from highest to lowest priority.
    pub priority: Vec<usize>,
    /// `mirror[j]` is the joint that takes `j`'s place under a horizontal flip.
    pub mirror: Vec<usize>,
    pub horizontal_axis: usize,
    pub class_names: Vec<String>,
}

impl DatasetDescriptor {
    /// Identity priority and mirror map, horizontal axis 0.
    pub fn plain(joints: usize, dims: usize, class_names: Vec<String>) -> Self {
        Self {
            joints,
            dims,
            priority: (0..joints).collect(),
            mirror: (0..joints).collect(),
            horizontal_axis: 0,
            class_names,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.joints < 2 {
            return Err(Error::input("descriptor needs at least two joints"));
        }
        if !(2..=3).contains(&self.dims) {
            return Err(Error::input("descriptor dims must be 2 or 3"));
        }
        if self.horizontal_axis >= self.dims {
            return Err(Error::input("horizontal axis out of range"));
        }
        if !is_permutation(&self.priority, self.joints) {
            return Err(Error::input("priority order is not a permutation of the joints"));
        }
        if !is_permutation(&self.mirror, self.joints) {
            return Err(Error::input("mirror map is not a permutation of the joints"));
        }
        if self.mirror.iter().enumerate().any(|(j, &m)| self.mirror[m] != j) {
            return Err(Error::input("mirror map is not an involution"));
        }
        Ok(())
    }

    /// Descriptor for `bodies` copies of this skeleton treated as one body.
    /// Body 0's joints keep precedence over body 1's in the priority order.
    pub fn stacked(&self, bodies: usize) -> Self {
        let n = self.joints;
        let shift = |v: &[usize], b: usize| v.iter().map(move |&j| j + b * n).collect::<Vec<_>>();
        Self {
            joints: n * bodies,
            dims: self.dims,
            priority: (0..bodies).flat_map(|b| shift(&self.priority, b)).collect(),
            mirror: (0..bodies).flat_map(|b| shift(&self.mirror, b)).collect(),
            horizontal_axis: self.horizontal_axis,
            class_names: self.class_names.clone(),
        }
    }
}

fn is_permutation(v: &[usize], n: usize) -> bool {
    if v.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    v.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_zero_fills_missing_slot() {
        let clip = SkeletonClip::dense("c", [2, 1, 2, 2], vec![1.0; 8]).unwrap();
        let body = clip.body(&[0], 2).unwrap();
        assert_eq!(body.joints(), 4);
        assert_eq!(body.frame(0), &[1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn descriptor_validation() {
        let mut d = DatasetDescriptor::plain(4, 2, vec![]);
        d.validate().unwrap();
        d.mirror = vec![1, 2, 0, 3];
        assert!(d.validate().is_err());
        d.mirror = vec![1, 0, 3, 2];
        d.validate().unwrap();
        d.priority = vec![0, 0, 1, 2];
        assert!(d.validate().is_err());
    }

    #[test]
    fn stacked_descriptor_offsets_second_body() {
        let mut d = DatasetDescriptor::plain(3, 2, vec![]);
        d.priority = vec![2, 0, 1];
        d.mirror = vec![1, 0, 2];
        let s = d.stacked(2);
        assert_eq!(s.priority, vec![2, 0, 1, 5, 3, 4]);
        assert_eq!(s.mirror, vec![1, 0, 2, 4, 3, 5]);
        s.validate().unwrap();
    }
}
