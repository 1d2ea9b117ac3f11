package fixtures;

// leading comment
public class Sloc {
    /* block
       comment */
    int x = 1;

    int y = 2;
}
