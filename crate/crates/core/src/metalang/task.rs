use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Knowledge {
    Property,
    Fingerprint,
    Conformation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Noise {
    Token,
    Sequence,
    Order,
}

/// Which half of the sequence the noise corrupts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Subject,
    Object,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaskSpec {
    pub knowledge: Knowledge,
    pub noise: Noise,
    pub direction: Direction,
}

pub const TASK_COUNT: usize = 18;

impl TaskSpec {
    pub const fn new(knowledge: Knowledge, noise: Noise, direction: Direction) -> Self {
        TaskSpec { knowledge, noise, direction }
    }

    pub fn all() -> [TaskSpec; TASK_COUNT] {
        std::array::from_fn(Self::from_index)
    }

    pub fn from_index(i: usize) -> TaskSpec {
        let knowledge = [Knowledge::Property, Knowledge::Fingerprint, Knowledge::Conformation][i / 6];
        let noise = [Noise::Token, Noise::Sequence, Noise::Order][i / 2 % 3];
        let direction = [Direction::Subject, Direction::Object][i % 2];
        TaskSpec { knowledge, noise, direction }
    }

    pub fn index(self) -> usize {
        self.knowledge as usize * 6 + self.noise as usize * 2 + self.direction as usize
    }

    /// Vocabulary token naming this task, e.g. `<prop_seq_subj>`.
    pub fn tag(self) -> String {
        let k = ["prop", "fp", "conf"][self.knowledge as usize];
        let n = ["tok", "seq", "ord"][self.noise as usize];
        let d = ["subj", "obj"][self.direction as usize];
        format!("<{k}_{n}_{d}>")
    }

    pub fn from_tag(tag: &str) -> Option<TaskSpec> {
        Self::all().into_iter().find(|t| t.tag() == tag)
    }

    /// Property-conditioned molecule generation.
    pub const GENERATE: TaskSpec = TaskSpec::new(Knowledge::Property, Noise::Sequence, Direction::Subject);
    /// Property prediction from SMILES.
    pub const PREDICT: TaskSpec = TaskSpec::new(Knowledge::Property, Noise::Sequence, Direction::Object);
}

impl fmt::Display for TaskSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn eighteen_distinct() {
        let all = TaskSpec::all();
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), 18);
        assert_eq!(all.iter().map(|t| t.tag()).collect::<HashSet<_>>().len(), 18);
        for (i, t) in all.iter().enumerate() {
            assert_eq!(t.index(), i);
            assert_eq!(TaskSpec::from_tag(&t.tag()), Some(*t));
        }
        assert_eq!(TaskSpec::GENERATE.tag(), "<prop_seq_subj>");
    }
}
