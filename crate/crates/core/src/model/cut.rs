use std::fmt;

use super::Chart;

/// Per-lifeline location indices of a running copy, in the chart's
/// instance order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cut(pub Vec<u16>);

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, loc) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{loc}")?;
        }
        f.write_str(">")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    PreActive,
    Active,
}

/// A live copy of a universal chart. `chart` indexes `SystemModel::charts`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RunningCopy {
    pub chart: usize,
    pub mode: Mode,
    pub cut: Cut,
}

/// Where each element sits on the lifelines it touches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementSlot {
    pub lifelines: Vec<usize>,
    pub positions: Vec<u16>,
}

/// The location structure of a chart: which lifeline locations each element
/// occupies. Elements on one lifeline are ordered by their position in the
/// chart; the cross-lifeline order comes only from shared elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartShape {
    pub lifelines: Vec<String>,
    pub slots: Vec<ElementSlot>,
    pub pre_len: usize,
    lifeline_len: Vec<u16>,
    pre_count: Vec<u16>,
}

impl ChartShape {
    pub fn new(chart: &Chart) -> Self {
        let lifelines = chart.instances.clone();
        let mut lifeline_len = vec![0u16; lifelines.len()];
        let mut slots = Vec::new();
        let mut pre_count = vec![0u16; lifelines.len()];
        for (idx, element) in chart.elements().enumerate() {
            if idx == chart.prechart.len() {
                pre_count = lifeline_len.clone();
            }
            let mut slot = ElementSlot {
                lifelines: Vec::new(),
                positions: Vec::new(),
            };
            for name in element.lifelines() {
                if let Some(l) = lifelines.iter().position(|x| x == name) {
                    slot.lifelines.push(l);
                    slot.positions.push(lifeline_len[l]);
                    lifeline_len[l] += 1;
                }
            }
            slots.push(slot);
        }
        if chart.main.is_empty() {
            pre_count = lifeline_len.clone();
        }
        ChartShape {
            lifelines,
            slots,
            pre_len: chart.prechart.len(),
            lifeline_len,
            pre_count,
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn lifeline_len(&self, lifeline: usize) -> u16 {
        self.lifeline_len[lifeline]
    }

    pub fn zero_cut(&self) -> Cut {
        Cut(vec![0; self.lifelines.len()])
    }

    pub fn final_cut(&self) -> Cut {
        Cut(self.lifeline_len.clone())
    }

    pub fn is_final(&self, cut: &Cut) -> bool {
        cut.0 == self.lifeline_len
    }

    pub fn in_main(&self, element: usize) -> bool {
        element >= self.pre_len
    }

    /// Whether `element` lies behind the cut. Only meaningful for legal cuts.
    pub fn is_passed(&self, cut: &Cut, element: usize) -> bool {
        let slot = &self.slots[element];
        match slot.lifelines.first() {
            Some(&l) => cut.0[l] > slot.positions[0],
            None => false,
        }
    }

    pub fn prechart_complete(&self, cut: &Cut) -> bool {
        cut.0.iter().zip(&self.pre_count).all(|(c, p)| c >= p)
    }

    pub fn mode_of(&self, cut: &Cut) -> Mode {
        if self.prechart_complete(cut) {
            Mode::Active
        } else {
            Mode::PreActive
        }
    }

    /// A cut is legal iff no element is passed on some of its lifelines but
    /// not on others, and no main chart element is passed before the whole
    /// prechart. The passed set is then downward closed.
    pub fn is_legal(&self, cut: &Cut) -> bool {
        if cut.0.len() != self.lifelines.len() {
            return false;
        }
        if cut.0.iter().zip(&self.lifeline_len).any(|(c, n)| c > n) {
            return false;
        }
        let main_started = cut
            .0
            .iter()
            .zip(&self.pre_count)
            .any(|(c, p)| c > p);
        if main_started && !self.prechart_complete(cut) {
            return false;
        }
        self.slots.iter().all(|slot| {
            let mut passed = slot
                .lifelines
                .iter()
                .zip(&slot.positions)
                .map(|(&l, &p)| cut.0[l] > p);
            match passed.next() {
                Some(first) => passed.all(|p| p == first),
                None => true,
            }
        })
    }

    /// Whether the element can be passed next. Main chart elements wait for
    /// the whole prechart.
    pub fn is_enabled(&self, cut: &Cut, element: usize) -> bool {
        let slot = &self.slots[element];
        if slot.lifelines.is_empty() {
            return false;
        }
        let at_location = slot
            .lifelines
            .iter()
            .zip(&slot.positions)
            .all(|(&l, &p)| cut.0[l] == p);
        at_location && (!self.in_main(element) || self.prechart_complete(cut))
    }

    pub fn enabled(&self, cut: &Cut) -> impl Iterator<Item = usize> + '_ {
        let cut = cut.clone();
        (0..self.slots.len()).filter(move |&e| self.is_enabled(&cut, e))
    }

    pub fn advance(&self, cut: &Cut, element: usize) -> Cut {
        let mut next = cut.clone();
        for &l in &self.slots[element].lifelines {
            next.0[l] += 1;
        }
        next
    }

    /// Every legal cut, by brute-force enumeration of all location vectors.
    pub fn legal_cuts(&self) -> Vec<Cut> {
        let mut out = Vec::new();
        let mut current = vec![0u16; self.lifelines.len()];
        loop {
            let cut = Cut(current.clone());
            if self.is_legal(&cut) {
                out.push(cut);
            }
            let mut i = 0;
            loop {
                if i == current.len() {
                    out.sort();
                    return out;
                }
                if current[i] < self.lifeline_len[i] {
                    current[i] += 1;
                    break;
                }
                current[i] = 0;
                i += 1;
            }
        }
    }

    /// Cuts reachable from the zero cut by passing enabled elements.
    pub fn reachable_cuts(&self) -> Vec<Cut> {
        let mut seen = vec![self.zero_cut()];
        let mut frontier = vec![self.zero_cut()];
        while let Some(cut) = frontier.pop() {
            for e in self.enabled(&cut).collect::<Vec<_>>() {
                let next = self.advance(&cut, e);
                if !seen.contains(&next) {
                    seen.push(next.clone());
                    frontier.push(next);
                }
            }
        }
        seen.sort();
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Element, Temperature::Hot};

    fn crossing_chart() -> Chart {
        Chart {
            name: "c".into(),
            instances: vec!["A".into(), "B".into()],
            prechart: vec![Element::message("A", "B", "m1", Hot)],
            main: vec![
                Element::message("B", "A", "m2", Hot),
                Element::assignment("A", "x", "1"),
                Element::message("B", "B", "m3", Hot),
            ],
            atomic: false,
        }
    }

    #[test]
    fn positions_follow_list_order() {
        let shape = crossing_chart().shape();
        assert_eq!(shape.slots[0].positions, vec![0, 0]);
        assert_eq!(shape.slots[1].positions, vec![1, 1]);
        assert_eq!(shape.slots[2].lifelines, vec![0]);
        assert_eq!(shape.slots[2].positions, vec![2]);
        assert_eq!(shape.final_cut(), Cut(vec![3, 3]));
    }

    #[test]
    fn main_waits_for_prechart() {
        let shape = crossing_chart().shape();
        let zero = shape.zero_cut();
        assert_eq!(shape.enabled(&zero).collect::<Vec<_>>(), vec![0]);
        assert_eq!(shape.mode_of(&zero), Mode::PreActive);
        let after = shape.advance(&zero, 0);
        assert_eq!(shape.mode_of(&after), Mode::Active);
        assert_eq!(shape.enabled(&after).collect::<Vec<_>>(), vec![1]);
        let after = shape.advance(&after, 1);
        // the assignment on A and the self message on B are independent
        assert_eq!(shape.enabled(&after).collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn split_elements_are_illegal() {
        let shape = crossing_chart().shape();
        assert!(!shape.is_legal(&Cut(vec![1, 0])));
        assert!(shape.is_legal(&Cut(vec![1, 1])));
        assert!(shape.is_legal(&Cut(vec![3, 2])));
        assert!(!shape.is_legal(&Cut(vec![4, 0])));
    }

    #[test]
    fn reachable_cuts_are_the_legal_cuts() {
        let shape = crossing_chart().shape();
        assert_eq!(shape.reachable_cuts(), shape.legal_cuts());
    }
}
