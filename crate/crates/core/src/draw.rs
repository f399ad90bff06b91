//! The draw-list each frame renders to: a flat, serializable list of 2D
//! commands with balanced transform push/pop. Canonical serialization rounds
//! every number to 1e-4 so digests ignore floating-point noise.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::geom::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Color(pub u8, pub u8, pub u8);

impl Color {
    pub const INK: Color = Color(0xf2, 0xf2, 0xf2);
    pub const DIM: Color = Color(0x80, 0x80, 0x80);
    pub const ACCENT: Color = Color(0x4a, 0x90, 0xe2);
    pub const HIGHLIGHT: Color = Color(0xf5, 0xa6, 0x23);
    pub const ALERT: Color = Color(0xe0, 0x3c, 0x31);
    pub const LINK: Color = Color(0x7e, 0xd3, 0x21);
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

impl Serialize for Color {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let hex = s
            .strip_prefix('#')
            .filter(|h| h.len() == 6)
            .ok_or_else(|| D::Error::custom(format!("bad color {s:?}")))?;
        let byte = |i: usize| {
            u8::from_str_radix(&hex[i..i + 2], 16)
                .map_err(|_| D::Error::custom(format!("bad color {s:?}")))
        };
        Ok(Color(byte(0)?, byte(2)?, byte(4)?))
    }
}

/// Placement of a sketch on the board: translate · rotate · scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transform {
    pub position: Point2,
    pub scale: f64,
    /// Radians; positive turns clockwise on the y-down board.
    pub rotation: f64,
}

impl Transform {
    pub fn at(position: Point2, scale: f64) -> Self {
        Self {
            position,
            scale,
            rotation: 0.0,
        }
    }

    /// Local sketch coordinates to board coordinates.
    pub fn apply(&self, local: Point2) -> Point2 {
        self.position + (local * self.scale).rotated(self.rotation)
    }

    /// Board coordinates to local sketch coordinates.
    pub fn inverse(&self, board: Point2) -> Point2 {
        (board - self.position).rotated(-self.rotation) * (1.0 / self.scale)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum DrawCommand {
    Curve {
        points: Vec<Point2>,
        color: Color,
        width: f64,
    },
    Line {
        p0: Point2,
        p1: Point2,
        color: Color,
        width: f64,
    },
    Oval {
        center: Point2,
        rx: f64,
        ry: f64,
        color: Color,
        filled: bool,
    },
    Text {
        text: String,
        anchor: Point2,
        size: f64,
        color: Color,
    },
    #[serde(rename = "push")]
    PushTransform { transform: Transform },
    #[serde(rename = "pop")]
    PopTransform,
}

fn round4(x: f64) -> f64 {
    let r = (x * 1e4).round() / 1e4;
    if r == 0.0 {
        0.0 // drops the sign of -0.0
    } else {
        r
    }
}

fn round_point(p: Point2) -> Point2 {
    Point2::new(round4(p.x), round4(p.y))
}

impl DrawCommand {
    fn numbers(&self) -> Vec<f64> {
        match self {
            DrawCommand::Curve { points, width, .. } => points
                .iter()
                .flat_map(|p| [p.x, p.y])
                .chain([*width])
                .collect(),
            DrawCommand::Line { p0, p1, width, .. } => vec![p0.x, p0.y, p1.x, p1.y, *width],
            DrawCommand::Oval { center, rx, ry, .. } => vec![center.x, center.y, *rx, *ry],
            DrawCommand::Text { anchor, size, .. } => vec![anchor.x, anchor.y, *size],
            DrawCommand::PushTransform { transform: t } => {
                vec![t.position.x, t.position.y, t.scale, t.rotation]
            }
            DrawCommand::PopTransform => vec![],
        }
    }

    fn rounded(&self) -> DrawCommand {
        match self {
            DrawCommand::Curve {
                points,
                color,
                width,
            } => DrawCommand::Curve {
                points: points.iter().map(|&p| round_point(p)).collect(),
                color: *color,
                width: round4(*width),
            },
            DrawCommand::Line {
                p0,
                p1,
                color,
                width,
            } => DrawCommand::Line {
                p0: round_point(*p0),
                p1: round_point(*p1),
                color: *color,
                width: round4(*width),
            },
            DrawCommand::Oval {
                center,
                rx,
                ry,
                color,
                filled,
            } => DrawCommand::Oval {
                center: round_point(*center),
                rx: round4(*rx),
                ry: round4(*ry),
                color: *color,
                filled: *filled,
            },
            DrawCommand::Text {
                text,
                anchor,
                size,
                color,
            } => DrawCommand::Text {
                text: text.clone(),
                anchor: round_point(*anchor),
                size: round4(*size),
                color: *color,
            },
            DrawCommand::PushTransform { transform: t } => DrawCommand::PushTransform {
                transform: Transform {
                    position: round_point(t.position),
                    scale: round4(t.scale),
                    rotation: round4(t.rotation),
                },
            },
            DrawCommand::PopTransform => DrawCommand::PopTransform,
        }
    }
}

/// An ordered frame of draw commands.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DrawList {
    commands: Vec<DrawCommand>,
}

impl DrawList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, cmd: DrawCommand) {
        self.commands.push(cmd);
    }

    pub fn commands(&self) -> &[DrawCommand] {
        &self.commands
    }

    pub fn len(&self) -> usize {
        self.commands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }

    pub fn line(&mut self, p0: Point2, p1: Point2, color: Color, width: f64) {
        self.push(DrawCommand::Line {
            p0,
            p1,
            color,
            width,
        });
    }

    pub fn curve(&mut self, points: Vec<Point2>, color: Color, width: f64) {
        self.push(DrawCommand::Curve {
            points,
            color,
            width,
        });
    }

    pub fn circle(&mut self, center: Point2, r: f64, color: Color, filled: bool) {
        self.push(DrawCommand::Oval {
            center,
            rx: r,
            ry: r,
            color,
            filled,
        });
    }

    pub fn text(&mut self, text: impl Into<String>, anchor: Point2, size: f64, color: Color) {
        self.push(DrawCommand::Text {
            text: text.into(),
            anchor,
            size,
            color,
        });
    }

    /// Closed outline of an axis-aligned rectangle.
    pub fn rect(&mut self, min: Point2, max: Point2, color: Color, width: f64) {
        let pts = vec![
            min,
            Point2::new(max.x, min.y),
            max,
            Point2::new(min.x, max.y),
            min,
        ];
        self.curve(pts, color, width);
    }

    /// Every push has a matching pop and no pop comes first.
    pub fn is_balanced(&self) -> bool {
        let mut depth = 0i64;
        for c in &self.commands {
            match c {
                DrawCommand::PushTransform { .. } => depth += 1,
                DrawCommand::PopTransform => {
                    depth -= 1;
                    if depth < 0 {
                        return false;
                    }
                }
                _ => {}
            }
        }
        depth == 0
    }

    pub fn all_finite(&self) -> bool {
        self.commands
            .iter()
            .all(|c| c.numbers().iter().all(|x| x.is_finite()))
    }

    /// Copy with every number rounded to four decimal places.
    pub fn canonical(&self) -> DrawList {
        DrawList {
            commands: self.commands.iter().map(DrawCommand::rounded).collect(),
        }
    }

    /// The bytes frame digests are computed over.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.canonical()).expect("draw lists always serialize")
    }
}
