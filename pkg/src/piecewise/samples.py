"""Small reference designs used by the demos, the test-suite and ``bench``."""

from __future__ import annotations

QUEUE = """\
module queue (
    input clk,
    input [31:0] write_data,
    input write_en, read_en,
    output [31:0] read_data,
    output is_empty, is_full
);

reg [31:0] content = 0;
reg [1:0] in_use = 0;

always @(posedge clk) begin
 if (write_en) begin
    content <= write_data;
    in_use <= 1;
 end

 if (read_en) begin
   in_use <= 0;
 end
end

assign read_data = (read_en) ? content : 0;
assign is_empty = in_use[0];
assign is_full = ~is_empty;

endmodule
"""

TWO_QUEUE_TOP = """\
module top (
    input clk,
    input [31:0] i_data,
    input i_irdy, o_trdy,
    output [31:0] o_data,
    output o_irdy, i_trdy
);

    wire [31:0] data;
    wire irdy, trdy;
    wire q1_is_empty, q1_is_full;
    wire q2_is_empty, q2_is_full;

    queue q1(.clk(clk),
             .write_data(i_data),
             .write_en(i_irdy),
             .read_en(trdy),
             .read_data(data),
             .is_empty(q1_is_empty),
             .is_full(q1_is_full));

    // Handshake signals
    assign irdy = ~q1_is_empty;
    assign trdy = ~q2_is_full;

    assign i_trdy = ~q1_is_full;
    assign o_irdy = ~q2_is_empty;

    queue q2(.clk(clk),
             .write_data(data),
             .write_en(irdy),
             .read_en(o_trdy),
             .read_data(o_data),
             .is_empty(q2_is_empty),
             .is_full(q2_is_full));

endmodule
"""

TWO_QUEUE = TWO_QUEUE_TOP + "\n" + QUEUE

# Two independent always blocks, each gated by its own input.
TOY = """\
module toy (
    input clk,
    input g0, g1,
    input [1:0] inpA, inpB,
    output reg [1:0] x = 0,
    output reg [1:0] y = 0
);
always @ (posedge clk) begin
   if (g0)
      x <= inpA;
   else
      x <= 0;
end

always @ (posedge clk) begin
   if (g1)
      y <= inpB;
   else
      y <= 0;
end
endmodule
"""

# Same blocks with both gates driven from one input.
TOY_TIED = """\
module toy (
    input clk,
    input g,
    input [1:0] inpA, inpB,
    output reg [1:0] x = 0,
    output reg [1:0] y = 0
);
wire g0, g1;
assign g0 = g;
assign g1 = g;
always @ (posedge clk) begin
   if (g0)
      x <= inpA;
   else
      x <= 0;
end

always @ (posedge clk) begin
   if (g1)
      y <= inpB;
   else
      y <= 0;
end
endmodule
"""

# Continuous assignment regression designs.
CASE1 = """\
module case1 (input clk, input [3:0] input_signal, output [3:0] read_data);
    assign read_data = input_signal;
endmodule
"""

CASE2 = """\
module case2 (input clk, input [3:0] d, input en, output [3:0] read_data);
    reg [3:0] content = 0;
    always @(posedge clk) if (en) content <= d;
    assign read_data = content[3:0];
endmodule
"""

CASE2A = """\
module case2a (input clk, input [3:0] d, input en, output [3:0] read_data);
    reg [3:0] content = 0;
    reg [3:0] some_content = 4'd5;
    wire [3:0] read_data2;
    always @(posedge clk) begin
        if (en) content <= d;
        else some_content <= d;
    end
    assign read_data = read_data2 & content;
    assign read_data2 = some_content[3:0];
endmodule
"""

CASE3 = """\
module case3 (input clk, input [3:0] d, output [3:0] read_data);
    reg [3:0] content = 0;
    always @(posedge clk) content <= d;
    assign read_data = read_data & content;
endmodule
"""

LATCH = """\
module latch (input clk, input en, input [3:0] d, output [3:0] q);
    assign q = en ? d : q;
endmodule
"""

WRITE_WRITE = """\
module ww (input clk, input a, input b, output reg x = 0);
    always @(posedge clk) x <= a;
    always @(posedge clk) x <= b;
endmodule
"""

BLOCKING = """\
module blk (input clk, input a, output reg x = 0);
    always @(posedge clk) x = a;
endmodule
"""

# Module C feeds B, B feeds A.
CHAIN = """\
module chain (input clk, input [3:0] i, output [3:0] o);
    wire [3:0] c_out, b_out;
    stage A (.clk(clk), .d(b_out), .q(o));
    stage B (.clk(clk), .d(c_out), .q(b_out));
    stage C (.clk(clk), .d(i), .q(c_out));
endmodule

module stage (input clk, input [3:0] d, output [3:0] q);
    reg [3:0] r = 0;
    always @(posedge clk) r <= d + 4'd1;
    assign q = r;
endmodule
"""

CASE_STMT = """\
module casedemo (input clk, input [1:0] s, input [3:0] d, output reg [3:0] r = 0);
    always @(posedge clk)
        case (s)
            2'b00: r <= d;
            2'b01: r <= ~d;
            default: r <= 4'd0;
        endcase
endmodule
"""

ASSERT_TOY = "assert property (@(posedge clk) !(x == inpA && y == inpB));\n"
ASSERT_TWO_QUEUE = "assert property (@(posedge clk) !(top.q1.in_use == 1 && i_trdy));\n"


def synthetic(n_blocks: int, branches: int, data_width: int = 2) -> str:
    """An ``n_blocks`` x ``branches`` design whose blocks share no signals.

    Block ``i`` has ``branches`` sequential ``if`` statements, each gated by
    its own 1-bit input, writing registers owned by that block only.
    """
    ports = ["input clk"]
    body = []
    for i in range(n_blocks):
        ports.append(f"input [{data_width - 1}:0] d{i}")
        lines = []
        for j in range(branches):
            ports.append(f"input g{i}_{j}")
            body.append(f"    reg [{data_width - 1}:0] r{i}_{j} = 0;")
            rhs = f"d{i}" if j % 2 == 0 else f"~d{i}"
            lines.append(f"        if (g{i}_{j}) r{i}_{j} <= {rhs};")
        body.append("    always @(posedge clk) begin")
        body.extend(lines)
        body.append("    end")
    return "module synth (\n    " + ",\n    ".join(ports) + "\n);\n" + "\n".join(body) + "\nendmodule\n"
