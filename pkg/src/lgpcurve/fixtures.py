"""Reference inputs used by the tests, the CLI demo and the README."""

EX1 = {
    "f": "x^2+y^2+z^2-4",
    "g": "(z-1)*(x^2+y^2-3*z^2)",
    "box": "-2,2,-2,2,-2,2",
    "eps": 0.01,
}

EX2 = {
    "f": "x^2+y^2+z^2-4",
    "g": "(x^2+y^2+2*y-z^2)*(z-x-4*y)",
    "box": "-2,2,-2,2,-2,2",
    "eps": 0.013,
}

EX3 = {
    "f": ("95-94*x^3+64*x^2*y+28*x^2*z-61*x^2+69*x*y^2-53*x*y*z-59*x*y+28*x*z^2-15*x*z"
          "-83*x-3*y^3+59*y^2*z+49*y^2+4*y*z^2+11*y*z+5*y-81*z^3-8*z^2-9*z"),
    "g": ("49+7*x^3-46*x^2*y+87*x^2*z+94*x^2+73*x*y^2+93*x*y*z-3*x*y-27*x*z^2+56*x*z"
          "+70*x+72*y^3-37*y^2*z-20*y^2+79*y*z^2-78*y*z-3*y+94*z^3+30*z^2+47*z"),
    "box": "-2,2,-2,2,-2,2",
    "eps": 0.014,
}

EXAMPLES = {"ex1": EX1, "ex2": EX2, "ex3": EX3}
