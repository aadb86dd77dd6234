"""Exception hierarchy. Each error carries enough context to name the offending input."""


class HopperstatError(Exception):
    pass


# imaging
class ImageError(HopperstatError):
    pass


class UnsupportedFormat(ImageError):
    pass


class CorruptImage(ImageError):
    pass


class ZeroDimension(ImageError):
    pass


class OutOfBounds(ImageError):
    def __init__(self, line_name, x, y, width, height):
        self.line_name = line_name
        self.coord = (x, y)
        super().__init__(
            f"line {line_name}: endpoint ({x}, {y}) outside {width}x{height} image"
        )


# linestats
class EmptySample(HopperstatError):
    pass


# classifier
class CalibrationError(HopperstatError):
    pass


class MissingClass(CalibrationError):
    def __init__(self, label):
        self.label = label
        super().__init__(f"MissingClass {label}")


class NonMonotoneClasses(CalibrationError):
    def __init__(self, lower, upper, lower_mean, upper_mean):
        self.pair = (lower, upper)
        super().__init__(
            f"NonMonotoneClasses {lower}/{upper}: mean {lower_mean:.6g} >= {upper_mean:.6g}"
        )


class DegenerateGate(CalibrationError):
    pass


class MalformedModel(HopperstatError):
    pass


# synthcorpus
class InvalidParams(HopperstatError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class IoFailure(HopperstatError):
    pass


# evalharness
class EvalError(HopperstatError):
    pass


class MissingImage(EvalError):
    pass


class LineOutOfBounds(EvalError):
    def __init__(self, file, cause):
        self.file = file
        super().__init__(f"{file}: {cause}")


class EmptyCorpus(EvalError):
    pass
